#pragma once

#include <span>
#include <vector>

#include "ablate/field.hpp"
#include "ablate/geometry.hpp"

namespace ablate {

// Gradients of the triangle side lengths (a = |q_c - q|, b = |q - p_c|,
// c = ref_length) with respect to the beam direction v. a and c do not depend
// on v; only b does.
struct SideGradients {
  Vec3 da_dv{Vec3::Zero()};
  Vec3 db_dv{Vec3::Zero()};
  Vec3 dc_dv{Vec3::Zero()};
};

// Throws SingularConfig when q coincides with the incident center (b = 0).
SideGradients side_gradients(const Vec3& q, const Angles& a, const AblationFrame& frame);

// Gradient of the squared projected distance s^2 with respect to v, via
// d(s^2)/db * db/dv (the a and c terms vanish). Returns zero at the ablation
// center (q == q_c), where s^2 is stationary.
Vec3 dist_sq_gradient(const Vec3& q, const Angles& a, const AblationFrame& frame);

// Jacobian of the ablated point with respect to the beam direction:
// dQ/dv = depth * e^mu * (I - v * d(s^2)/dv^T / (2 width^2)), mu = -s^2/(2 width^2).
Mat3 cut_jacobian_dir(const Vec3& q, const Angles& a, const AblationFrame& frame,
                      const BeamParams& beam);

// Jacobian of the beam direction with respect to the rotation angles; column j
// differentiates only the j-th rotation factor of Rx * Ry * Rz applied to
// base_dir. With base_dir = (0,0,-1) the z column is identically zero.
Mat3 dir_jacobian(const Angles& a, const AblationFrame& frame);

// Full chain dQ/dtheta = dQ/dv * dv/dtheta.
Mat3 cut_jacobian(const Vec3& q, const Angles& a, const AblationFrame& frame,
                  const BeamParams& beam);

// Per-point contribution to the objective gradient; `row` is
// dC/dphi * grad(phi)^T * dQ/dtheta for that point.
struct PointGradient {
  int point{0};
  Vec3 row{Vec3::Zero()};
  double phi{0.0};
  bool clamped{false};
  bool skipped{false};  // singular configuration, excluded from the sum
};

struct ObjectiveGradient {
  Vec3 total{Vec3::Zero()};
  std::vector<PointGradient> rows;
  int clamp_events{0};
};

// Gradient of f(theta) = sum_i C(phi(Q_i(theta))) over the active subset of
// point indices. Points whose ablated position lies beyond the cost margin
// contribute exactly zero (the field is not even sampled for them). The sum
// runs in ascending point index order for bit-deterministic results; singular
// points are flagged and excluded.
ObjectiveGradient objective_gradient(const PointSet& set, const Angles& a,
                                     const AblationFrame& frame, const BeamParams& beam,
                                     const ScalarField3& phi, const VectorField3& grad_phi,
                                     const CostParams& cost, std::span<const int> active);

// f(theta) over all points (the quantity the planner reports each iteration).
double objective_value(const PointSet& set, const Angles& a, const AblationFrame& frame,
                       const BeamParams& beam, const ScalarField3& phi,
                       const CostParams& cost, int* clamp_events = nullptr);

}  // namespace ablate
