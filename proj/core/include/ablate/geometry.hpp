#pragma once

#include <functional>
#include <vector>

#include "ablate/common.hpp"

namespace ablate {

// Ablation frame: the pose the laser is aimed from. `center` is the ablation
// center q_c on the target surface, `base_dir` the unrotated beam direction v0
// (unit, pointing into the surface), `ref_length` the auxiliary lever length
// used to place the incident center behind the surface. The box bounds
// constrain the rotation angles during constrained planning.
struct AblationFrame {
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 base_dir{0.0, 0.0, -1.0};
  double ref_length{1.0};
  AngleBounds bounds{};

  void validate() const;
};

// Gaussian beam energy-distribution parameters fitted from measured cavities:
// `depth` is the peak depth-of-cut per pulse (mm), `width` the lateral
// Gaussian spread (mm).
struct BeamParams {
  double depth{1.4376};
  double width{0.6486};

  void validate() const;
};

// Surface samples with stable integer indices (the vector index).
struct PointSet {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  void validate() const;
};

// Rotation about the frame axes: R = Rx(ax) * Ry(ay) * Rz(az), each factor the
// standard elementary rotation.
Mat3 rotation_matrix(const Angles& a);

// Beam direction for the given rotation angles: v = R * base_dir.
Vec3 incident_vector(const Angles& a, const AblationFrame& frame);

// Incident center p_c = q_c - v * ref_length (behind the surface, so the beam
// axis passes through p_c and q_c).
Vec3 incident_center(const AblationFrame& frame, const Vec3& v);

// Perpendicular distance s from surface point q to the beam axis, computed as
// the triangle altitude onto the p_c--q_c side via Heron's formula. The
// radicand is clamped at zero, which also covers the degenerate q == q_c and
// on-axis cases (s = 0).
double projected_distance(const Vec3& q, const Vec3& v, const AblationFrame& frame);

// Depth of cut d(s) = depth * exp(-s^2 / (2 width^2)).
double depth_of_cut(double s, const BeamParams& beam);

// One-pulse update of a surface point: q' = q + v * d(s).
Vec3 ablate_point(const Vec3& q, const Angles& a, const AblationFrame& frame,
                  const BeamParams& beam);

// Applies ablate_point to every point; indices are preserved.
PointSet ablate_set(const PointSet& set, const Angles& a,
                    const AblationFrame& frame, const BeamParams& beam);

// Flat rectangular nx x ny grid of points centered at `center`, spanning the
// world x/y axes with the given spacing; `height`, if set, offsets z per (x,y)
// relative to the center.
PointSet make_grid_patch(int nx, int ny, double spacing, const Vec3& center,
                         const std::function<double(double, double)>& height = {});

}  // namespace ablate
