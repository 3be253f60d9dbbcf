#pragma once

#include <cstdint>
#include <vector>

#include "ablate/jacobian.hpp"

namespace ablate {

// Finite-difference validation of every analytic derivative over seeded random
// non-degenerate configurations. The direction-space checks perturb v freely
// (the derivatives treat the triangle sides as functions of v with the
// reference side fixed); the full-objective check composes ramp fields, where
// trilinear sampling and the Sobel gradient are exact, so the comparison
// isolates the chain rule from grid discretization.
struct GradCheckConfig {
  int trials{1000};
  double fd_step{1e-6};            // h for the factor checks
  double objective_fd_step{1e-5};  // h for the full-objective check
  double tol_side{1e-6};
  double tol_dist_sq{1e-6};
  double tol_dir{1e-6};
  double tol_cut_dir{1e-5};
  double tol_cut{1e-5};
  double tol_objective{1e-3};
  bool inject_error{false};  // corrupt one derivative to prove detection
  std::uint64_t seed{20240915};

  void validate() const;
};

// Relative errors of one configuration, one column per checked operation.
struct GradCheckRow {
  int trial{0};
  double side_b{0.0};
  double dist_sq{0.0};
  double dir{0.0};
  double cut_dir{0.0};
  double cut{0.0};
  double objective{0.0};
};

struct GradCheckResult {
  std::vector<GradCheckRow> rows;
  GradCheckRow worst;  // column-wise maxima (trial = -1)
  bool passed{false};
};

GradCheckResult run_grad_check(const GradCheckConfig& cfg);

}  // namespace ablate
