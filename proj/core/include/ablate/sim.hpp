#pragma once

#include <cstdint>
#include <vector>

#include "ablate/planner.hpp"

namespace ablate {

// ---- Test 1: reference-direction tracking of a single point robot ----

struct Test1Spec {
  int runs{24};
  int steps{60};
  double step_size{0.3};
  double horizontal_range_deg{180.0};  // heading sampled in [-h, h]
  double vertical_range_deg{80.0};     // elevation sampled in [-v, v]
  int transient_steps{5};

  void validate() const;
};

struct Test1Run {
  int run{0};
  double heading_deg{0.0};
  double elevation_deg{0.0};
  Vec3 reference{Vec3::UnitX()};
  std::vector<double> step_err_deg;  // per-step XY heading error
  double median_err_deg{0.0};        // over steps past the transient
  double mean_err_deg{0.0};
  RobotTrace trace;
};

struct Test1Report {
  Test1Spec spec;
  std::vector<Test1Run> runs;
  double pooled_median_err_deg{0.0};  // all runs, steps past the transient
};

// Samples reference directions (heading uniform in the horizontal range,
// elevation in the vertical range; the elevation cap keeps the horizontal
// component nonzero) and tracks each with a follow-reference robot trace
// started at the frame center. Errors are XY-plane angles between the
// reference and the per-step displacement.
Test1Report run_test1(const Test1Spec& spec, const AblationFrame& frame,
                      const BeamParams& beam, std::uint64_t seed, int threads = 1);

// ---- Shared scenario for Tests 2 and 3 ----

// Six Gaussian-bowl boundaries of increasing lateral size, a flat point grid
// normal to the base direction at a per-test standoff above the bowl rim
// plane, and seeded initial angles drawn uniformly within the frame's box
// bounds.
struct ScenarioSpec {
  int bowls{6};
  double sigma_min{0.5};
  double sigma_max{1.75};
  double amplitude{1.4};
  Vec3 apex{0.0, 0.0, 0.0};
  int angles{9};
  int patch_nx{7}, patch_ny{7};
  double patch_spacing{0.4};
  int field_dim{64};        // lateral voxels per axis
  int field_dim_z{128};     // max vertical voxels
  double span_floor{5.0};   // min lateral field extent (mm)
  // Vertical coverage below the bowl floor and above the standoff. Robots that
  // punch through the boundary recover by following the field back up, so the
  // domain must extend well below the floor to keep their gradients honest.
  double margin_below{6.0}, margin_above{1.6};

  void validate() const;
  double sigma_of(int bowl) const;
};

struct BowlField {
  double sigma{0.0};
  ScalarField3 phi;
  VectorField3 grad_phi;
};

// Builds the signed field and its Sobel gradient for one bowl. The lateral
// extent spans ~6 sigma (at least span_floor plus the patch), the vertical
// extent covers the bowl depth and the standoff with margins.
BowlField build_bowl_field(const ScenarioSpec& scenario, int bowl, double standoff);

// ---- Test 2: independent descent-on-cost point robots ----

struct Test2Spec {
  ScenarioSpec scenario{};
  double standoff{2.0};
  int steps{40};
  double step_size{0.6};
  CostParams cost{};

  void validate() const;
};

struct Test2Robot {
  int bowl{0}, angle{0}, robot{0};
  double final_phi{0.0};
  double final_cost{0.0};
  int clamp_events{0};
};

struct Test2Report {
  Test2Spec spec;
  std::vector<Angles> initial_angles;  // bowls * angles entries
  std::vector<Test2Robot> robots;      // bowls * angles * patch size entries
  std::vector<RobotTrace> traces;      // parallel to `robots`
  double fraction_low_cost{0.0};       // final cost <= 0.5
  std::vector<long> histogram;         // final-cost bins of width hist_bin
  double hist_bin{0.05};
};

Test2Report run_test2(const Test2Spec& spec, const AblationFrame& frame,
                      const BeamParams& beam, std::uint64_t seed, int threads = 1);

// ---- Test 3: constrained one-pulse planning per surface ----

struct Test3Spec {
  ScenarioSpec scenario{};
  double standoff{0.25};
  double step_size{0.005};
  int max_iters{300};
  double select_fraction{0.30};
  double cost_tol{1e-6};
  int stall_iters{10};
  CostParams cost{};

  void validate() const;
};

struct Test3Run {
  int bowl{0}, angle{0};
  Angles theta_init{}, theta_star{};
  double initial_cost{0.0}, final_cost{0.0};
  Termination termination{Termination::max_iters};
  int clamp_events{0};
  std::vector<double> cost_trace;
  PointSet before, after;
};

struct Test3Report {
  Test3Spec spec;
  std::vector<Test3Run> runs;       // bowls * angles entries
  double fraction_reduced{0.0};     // final <= initial
  std::vector<long> histogram_final;
  double hist_bin{0.05};
};

// Same bowls and the same seeded angle sequence as run_test2 with this seed;
// one plan() call per (bowl, angle) with the shared frame at the patch center.
Test3Report run_test3(const Test3Spec& spec, const AblationFrame& frame,
                      const BeamParams& beam, std::uint64_t seed, int threads = 1);

}  // namespace ablate
