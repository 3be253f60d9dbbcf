#include "ablate/jacobian.hpp"

#include <algorithm>
#include <cmath>

namespace ablate {

SideGradients side_gradients(const Vec3& q, const Angles& a, const AblationFrame& frame) {
  const Vec3 v = incident_vector(a, frame);
  const Vec3 bvec = q - frame.center + v * frame.ref_length;  // q - p_c
  const double b = bvec.norm();
  if (b <= 1e-12)
    throw SingularConfig("surface point coincides with the incident center");
  SideGradients g;
  g.db_dv = bvec * (frame.ref_length / b);
  return g;
}

Vec3 dist_sq_gradient(const Vec3& q, const Angles& a, const AblationFrame& frame) {
  const double side_a = (frame.center - q).norm();
  if (side_a == 0.0) return Vec3::Zero();
  const Vec3 v = incident_vector(a, frame);
  const Vec3 bvec = q - frame.center + v * frame.ref_length;
  const double side_b = bvec.norm();
  if (side_b <= 1e-12)
    throw SingularConfig("surface point coincides with the incident center");
  const double side_c = frame.ref_length;
  // s^2 = (4/c^2) p(p-a)(p-b)(p-c); differentiating the Heron expansion in b
  // gives d(s^2)/db = b (a^2 + c^2 - b^2) / c^2.
  const double ds2_db =
      side_b * (side_a * side_a + side_c * side_c - side_b * side_b) /
      (side_c * side_c);
  const Vec3 db_dv = bvec * (frame.ref_length / side_b);
  return ds2_db * db_dv;
}

Mat3 cut_jacobian_dir(const Vec3& q, const Angles& a, const AblationFrame& frame,
                      const BeamParams& beam) {
  const Vec3 v = incident_vector(a, frame);
  const double s = projected_distance(q, v, frame);
  const double two_w2 = 2.0 * beam.width * beam.width;
  const double att = std::exp(-(s * s) / two_w2);
  const Vec3 gs2 = dist_sq_gradient(q, a, frame);
  return beam.depth * att *
         (Mat3::Identity() - (v * gs2.transpose()) / two_w2);
}

Mat3 dir_jacobian(const Angles& a, const AblationFrame& frame) {
  const double cx = std::cos(a.x), sx = std::sin(a.x);
  const double cy = std::cos(a.y), sy = std::sin(a.y);
  const double cz = std::cos(a.z), sz = std::sin(a.z);
  Mat3 rx, ry, rz, dx, dy, dz;
  rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
  ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  dx << 0, 0, 0, 0, -sx, -cx, 0, cx, -sx;
  dy << -sy, 0, cy, 0, 0, 0, -cy, 0, -sy;
  dz << -sz, -cz, 0, cz, -sz, 0, 0, 0, 0;
  Mat3 j;
  j.col(0) = dx * ry * rz * frame.base_dir;
  j.col(1) = rx * dy * rz * frame.base_dir;
  j.col(2) = rx * ry * dz * frame.base_dir;
  return j;
}

Mat3 cut_jacobian(const Vec3& q, const Angles& a, const AblationFrame& frame,
                  const BeamParams& beam) {
  return cut_jacobian_dir(q, a, frame, beam) * dir_jacobian(a, frame);
}

ObjectiveGradient objective_gradient(const PointSet& set, const Angles& a,
                                     const AblationFrame& frame, const BeamParams& beam,
                                     const ScalarField3& phi, const VectorField3& grad_phi,
                                     const CostParams& cost, std::span<const int> active) {
  ObjectiveGradient out;
  std::vector<int> order(active.begin(), active.end());
  std::sort(order.begin(), order.end());
  out.rows.reserve(order.size());
  for (int idx : order) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= set.size())
      throw InvalidInput("active index out of range");
    PointGradient pg;
    pg.point = idx;
    const Vec3 cut = ablate_point(set.points[idx], a, frame, beam);
    bool cl = false;
    pg.phi = sample_scalar(phi, cut, &cl);
    pg.clamped = cl;
    const double dc = obstacle_cost_grad(pg.phi, cost);
    if (dc != 0.0) {
      try {
        const Mat3 j = cut_jacobian(set.points[idx], a, frame, beam);
        bool cl2 = false;
        const Vec3 g = sample_vector(grad_phi, cut, &cl2);
        pg.clamped = pg.clamped || cl2;
        pg.row = dc * (j.transpose() * g);
      } catch (const SingularConfig&) {
        pg.skipped = true;
        pg.row = Vec3::Zero();
      }
    }
    if (pg.clamped) ++out.clamp_events;
    if (!pg.skipped) out.total += pg.row;
    out.rows.push_back(pg);
  }
  return out;
}

double objective_value(const PointSet& set, const Angles& a, const AblationFrame& frame,
                       const BeamParams& beam, const ScalarField3& phi,
                       const CostParams& cost, int* clamp_events) {
  double f = 0.0;
  int clamps = 0;
  const Vec3 v = incident_vector(a, frame);
  for (const Vec3& q : set.points) {
    const double s = projected_distance(q, v, frame);
    const Vec3 cut = q + v * depth_of_cut(s, beam);
    bool cl = false;
    const double ph = sample_scalar(phi, cut, &cl);
    if (cl) ++clamps;
    f += obstacle_cost(ph, cost);
  }
  if (clamp_events) *clamp_events = clamps;
  return f;
}

}  // namespace ablate
