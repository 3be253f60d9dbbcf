#include "ablate/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ablate {

void PlannerConfig::validate() const {
  if (!(std::isfinite(step_size) && step_size > 0.0))
    throw InvalidInput("planner step size must be positive");
  if (max_iters < 1) throw InvalidInput("planner max_iters must be >= 1");
  if (!(select_fraction > 0.0 && select_fraction <= 1.0))
    throw InvalidInput("select_fraction must be in (0, 1]");
  if (!(std::isfinite(cost_tol) && cost_tol > 0.0))
    throw InvalidInput("cost_tol must be positive");
  if (stall_iters < 1) throw InvalidInput("stall_iters must be >= 1");
  bounds.validate();
  if (!theta_init.finite() || !bounds.contains(theta_init))
    throw InvalidInput("theta_init must lie within the bounds");
}

Angles project_box(const Angles& theta, const AngleBounds& bounds) {
  Angles out;
  out.x = std::clamp(theta.x, bounds.lo.x, bounds.hi.x);
  out.y = std::clamp(theta.y, bounds.lo.y, bounds.hi.y);
  out.z = std::clamp(theta.z, bounds.lo.z, bounds.hi.z);
  return out;
}

Angles gd_step(const Angles& theta, const Vec3& grad, double alpha,
               const AngleBounds& bounds) {
  if (!grad.allFinite())
    throw InvalidInput("gradient is not finite at theta = (" +
                       std::to_string(theta.x) + ", " + std::to_string(theta.y) +
                       ", " + std::to_string(theta.z) + ")");
  return project_box(Angles::from_vec(theta.vec() - alpha * grad), bounds);
}

std::vector<int> select_active(const PointSet& set, const Angles& current,
                               const Angles& candidate, const AblationFrame& frame,
                               const BeamParams& beam, const ScalarField3& phi,
                               const CostParams& cost, double fraction) {
  const std::size_t n = set.size();
  if (n == 0) throw InvalidInput("select_active needs a non-empty point set");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw InvalidInput("select fraction must be in (0, 1]");
  std::vector<std::pair<double, int>> gains;
  gains.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 cut_cur = ablate_point(set.points[i], current, frame, beam);
    const Vec3 cut_cand = ablate_point(set.points[i], candidate, frame, beam);
    const double gain = obstacle_cost(sample_scalar(phi, cut_cand), cost) -
                        obstacle_cost(sample_scalar(phi, cut_cur), cost);
    gains.emplace_back(gain, static_cast<int>(i));
  }
  // Ascending gain, index as the tie break; pair ordering gives both.
  std::sort(gains.begin(), gains.end());
  const std::size_t keep = std::min<std::size_t>(
      n, static_cast<std::size_t>(
             std::ceil(fraction * static_cast<double>(n))));
  std::vector<int> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(gains[i].second);
  return out;
}

PlanResult plan(const PointSet& set, const AblationFrame& frame, const BeamParams& beam,
                const ScalarField3& phi, const VectorField3& grad_phi,
                const CostParams& cost, const PlannerConfig& cfg) {
  cfg.validate();
  frame.validate();
  beam.validate();
  cost.validate();
  set.validate();
  if (set.size() == 0) throw InvalidInput("plan needs a non-empty point set");

  PlanResult res;
  res.theta_star = cfg.theta_init;
  res.theta_trace.push_back(cfg.theta_init);
  int clamps = 0;
  double f_prev = objective_value(set, cfg.theta_init, frame, beam, phi, cost, &clamps);
  res.clamp_events += clamps;
  res.cost_trace.push_back(f_prev);
  if (cfg.record_trajectories)
    res.trajectories.push_back(ablate_set(set, cfg.theta_init, frame, beam));
  if (f_prev == 0.0) {
    res.termination = Termination::converged;
    return res;
  }

  std::vector<int> active(set.size());
  std::iota(active.begin(), active.end(), 0);
  Angles theta = cfg.theta_init;
  int stall_count = 0;
  res.termination = Termination::max_iters;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    res.active_sizes.push_back(static_cast<int>(active.size()));
    const ObjectiveGradient g =
        objective_gradient(set, theta, frame, beam, phi, grad_phi, cost, active);
    res.clamp_events += g.clamp_events;
    const Angles cand = gd_step(theta, g.total, cfg.step_size, cfg.bounds);
    active = select_active(set, theta, cand, frame, beam, phi, cost,
                           cfg.select_fraction);
    theta = cand;
    res.theta_trace.push_back(theta);
    const double f = objective_value(set, theta, frame, beam, phi, cost, &clamps);
    res.clamp_events += clamps;
    res.cost_trace.push_back(f);
    if (cfg.record_trajectories)
      res.trajectories.push_back(ablate_set(set, theta, frame, beam));
    if (f == 0.0) {
      res.termination = Termination::converged;
      break;
    }
    stall_count = std::abs(f - f_prev) < cfg.cost_tol ? stall_count + 1 : 0;
    f_prev = f;
    if (stall_count >= cfg.stall_iters) {
      res.termination = Termination::stalled;
      break;
    }
  }
  res.theta_star = theta;
  return res;
}

RobotTrace point_robot_trace(const Vec3& start, const Angles& theta_init,
                             const AblationFrame& frame, const BeamParams& beam,
                             const ScalarField3* phi, const VectorField3* grad_phi,
                             const TraceConfig& cfg) {
  if (cfg.steps < 1) throw InvalidInput("trace needs at least one step");
  if (!(std::isfinite(cfg.step_size) && cfg.step_size > 0.0))
    throw InvalidInput("trace step size must be positive");
  if (cfg.rule != TraceRule::follow_reference && (!phi || !grad_phi))
    throw InvalidInput("field-driven trace rules need phi and grad_phi");
  if (cfg.rule == TraceRule::follow_reference && cfg.reference.norm() == 0.0)
    throw InvalidInput("reference direction must be nonzero");
  beam.validate();

  AblationFrame local = frame;  // re-anchored at the robot each step
  RobotTrace tr;
  tr.positions.push_back(start);
  tr.angles.push_back(theta_init);
  Vec3 q = start;
  Angles theta = theta_init;
  for (int k = 0; k < cfg.steps; ++k) {
    local.center = q;
    // With the frame on the robot, s = 0, the lookahead is q + v * depth and
    // the Jacobian reduces to depth * dv/dtheta.
    const Vec3 v = incident_vector(theta, local);
    const Vec3 look = q + v * beam.depth;
    const Mat3 j = cut_jacobian(q, theta, local, beam);
    Vec3 dir = Vec3::Zero();  // steepest-ascent direction in theta
    switch (cfg.rule) {
      case TraceRule::ascend_phi: {
        bool cl = false;
        const Vec3 g = sample_vector(*grad_phi, look, &cl);
        if (cl) ++tr.clamp_events;
        dir = j.transpose() * g;
        break;
      }
      case TraceRule::descend_cost: {
        bool cl1 = false, cl2 = false;
        const double ph = sample_scalar(*phi, look, &cl1);
        const double dc = obstacle_cost_grad(ph, cfg.cost);
        if (dc != 0.0) {
          const Vec3 g = sample_vector(*grad_phi, look, &cl2);
          dir = -dc * (j.transpose() * g);
        }
        if (cl1 || cl2) ++tr.clamp_events;
        break;
      }
      case TraceRule::follow_reference:
        dir = j.transpose() * cfg.reference;
        break;
    }
    if (!dir.allFinite()) throw InvalidInput("trace update is not finite");
    theta = Angles::from_vec(theta.vec() + cfg.step_size * dir);
    q = ablate_point(q, theta, local, beam);
    tr.positions.push_back(q);
    tr.angles.push_back(theta);
  }
  return tr;
}

}  // namespace ablate
