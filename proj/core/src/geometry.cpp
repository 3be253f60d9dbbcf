#include "ablate/geometry.hpp"

#include <cmath>

namespace ablate {

void AblationFrame::validate() const {
  if (!center.allFinite() || !base_dir.allFinite() || !std::isfinite(ref_length))
    throw InvalidInput("ablation frame must be finite");
  if (std::abs(base_dir.norm() - 1.0) > 1e-9)
    throw InvalidInput("base_dir must be a unit vector");
  if (ref_length <= 0.0) throw InvalidInput("ref_length must be positive");
  bounds.validate();
}

void BeamParams::validate() const {
  if (!(std::isfinite(depth) && depth > 0.0))
    throw InvalidInput("beam depth must be positive");
  if (!(std::isfinite(width) && width > 0.0))
    throw InvalidInput("beam width must be positive");
}

void PointSet::validate() const {
  for (const Vec3& p : points)
    if (!p.allFinite()) throw InvalidInput("point set contains non-finite point");
}

Mat3 rotation_matrix(const Angles& a) {
  const double cx = std::cos(a.x), sx = std::sin(a.x);
  const double cy = std::cos(a.y), sy = std::sin(a.y);
  const double cz = std::cos(a.z), sz = std::sin(a.z);
  Mat3 rx, ry, rz;
  rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
  ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  return rx * ry * rz;
}

Vec3 incident_vector(const Angles& a, const AblationFrame& frame) {
  return rotation_matrix(a) * frame.base_dir;
}

Vec3 incident_center(const AblationFrame& frame, const Vec3& v) {
  return frame.center - v * frame.ref_length;
}

double projected_distance(const Vec3& q, const Vec3& v, const AblationFrame& frame) {
  const Vec3 pc = incident_center(frame, v);
  const double a = (frame.center - q).norm();
  const double b = (q - pc).norm();
  const double c = frame.ref_length;
  const double p = 0.5 * (a + b + c);
  const double radicand = p * (p - a) * (p - b) * (p - c);
  // Altitude onto side c: s * c / 2 = area. Clamp guards roundoff for
  // degenerate (collinear or coincident) triangles.
  return 2.0 * std::sqrt(std::max(radicand, 0.0)) / c;
}

double depth_of_cut(double s, const BeamParams& beam) {
  return beam.depth * std::exp(-(s * s) / (2.0 * beam.width * beam.width));
}

Vec3 ablate_point(const Vec3& q, const Angles& a, const AblationFrame& frame,
                  const BeamParams& beam) {
  const Vec3 v = incident_vector(a, frame);
  const double s = projected_distance(q, v, frame);
  return q + v * depth_of_cut(s, beam);
}

PointSet ablate_set(const PointSet& set, const Angles& a,
                    const AblationFrame& frame, const BeamParams& beam) {
  // v and R are shared by all points; the per-point work is the distance and
  // the exponential.
  const Vec3 v = incident_vector(a, frame);
  PointSet out;
  out.points.reserve(set.points.size());
  for (const Vec3& q : set.points) {
    const double s = projected_distance(q, v, frame);
    out.points.push_back(q + v * depth_of_cut(s, beam));
  }
  return out;
}

PointSet make_grid_patch(int nx, int ny, double spacing, const Vec3& center,
                         const std::function<double(double, double)>& height) {
  if (nx < 1 || ny < 1) throw InvalidInput("grid patch dims must be >= 1");
  if (!(spacing > 0.0)) throw InvalidInput("grid patch spacing must be positive");
  PointSet out;
  out.points.reserve(static_cast<std::size_t>(nx) * ny);
  const double x0 = -0.5 * (nx - 1) * spacing;
  const double y0 = -0.5 * (ny - 1) * spacing;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double x = x0 + i * spacing;
      const double y = y0 + j * spacing;
      const double z = height ? height(x, y) : 0.0;
      out.points.push_back(center + Vec3(x, y, z));
    }
  return out;
}

}  // namespace ablate
