#pragma once

#include <optional>
#include <vector>

#include "ablate/jacobian.hpp"

namespace ablate {

struct PlannerConfig {
  double step_size{0.01};  // rad per unit gradient
  int max_iters{150};
  Angles theta_init{};
  AngleBounds bounds{};
  double select_fraction{0.30};
  double cost_tol{1e-6};
  int stall_iters{10};
  bool record_trajectories{false};

  void validate() const;
};

enum class Termination { converged, stalled, max_iters };

struct PlanResult {
  Angles theta_star{};
  Termination termination{Termination::max_iters};
  std::vector<double> cost_trace;       // full objective, entry 0 = initial
  std::vector<Angles> theta_trace;      // iterates, entry 0 = theta_init
  std::vector<int> active_sizes;        // active-set size used per iteration
  int clamp_events{0};
  std::vector<PointSet> trajectories;   // ablated contours per iteration, optional
};

// Component-wise clamp onto the box (the closed-form minimizer of
// |theta - y|^2 over the box).
Angles project_box(const Angles& theta, const AngleBounds& bounds);

// One projected step theta - alpha * grad, clamped onto the box. Throws
// InvalidInput on a non-finite gradient.
Angles gd_step(const Angles& theta, const Vec3& grad, double alpha,
               const AngleBounds& bounds);

// Gain-based data selection: per point, gain = C(phi(Q(cand))) - C(phi(Q(cur))).
// Sorted ascending (most-improved first), ties broken by ascending point index;
// the first ceil(fraction * n) indices are returned in that order.
std::vector<int> select_active(const PointSet& set, const Angles& current,
                               const Angles& candidate, const AblationFrame& frame,
                               const BeamParams& beam, const ScalarField3& phi,
                               const CostParams& cost, double fraction);

// Minimizes f(theta) = sum_i C(phi(Q_i(theta))) over the box by projected
// gradient descent with gain selection: iteration 1 uses every point, later
// iterations the selected subset from the just-accepted candidate. The cost
// trace always records the full objective. Terminates `converged` when the
// full objective reaches zero, `stalled` when it changes by < cost_tol for
// stall_iters consecutive iterations, else `max_iters`.
PlanResult plan(const PointSet& set, const AblationFrame& frame, const BeamParams& beam,
                const ScalarField3& phi, const VectorField3& grad_phi,
                const CostParams& cost, const PlannerConfig& cfg);

// Point-robot update rules: ascend the sampled distance field, descend the
// obstacle cost, or follow a fixed reference direction in place of the field
// gradient.
enum class TraceRule { ascend_phi, descend_cost, follow_reference };

struct TraceConfig {
  TraceRule rule{TraceRule::descend_cost};
  int steps{40};
  double step_size{0.3};  // rad per unit gradient
  Vec3 reference{1.0, 0.0, 0.0};
  CostParams cost{};
};

struct RobotTrace {
  std::vector<Vec3> positions;  // steps + 1 entries, entry 0 = start
  std::vector<Angles> angles;   // steps + 1 entries, entry 0 = theta_init
  int clamp_events{0};
};

// Iterates one point robot: each step the frame is re-anchored at the robot
// (the pulse is aimed from the robot's current position, so the step length is
// the peak depth), theta is updated from the lookahead position Q(theta_k) by
// the chosen rule, and the robot then moves with the updated theta. Updates
// are unconstrained (no box). Field arguments may be null for
// follow_reference.
RobotTrace point_robot_trace(const Vec3& start, const Angles& theta_init,
                             const AblationFrame& frame, const BeamParams& beam,
                             const ScalarField3* phi, const VectorField3* grad_phi,
                             const TraceConfig& cfg);

}  // namespace ablate
