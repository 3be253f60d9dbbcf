#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ablate/sim.hpp"
#include "oracles.hpp"

using namespace ablate;

namespace {

Test1Spec small_test1() {
  Test1Spec spec;
  spec.runs = 6;
  spec.steps = 20;
  spec.transient_steps = 5;
  return spec;
}

ScenarioSpec small_scenario() {
  ScenarioSpec sc;
  sc.bowls = 2;
  sc.sigma_min = 0.6;
  sc.sigma_max = 1.2;
  sc.angles = 3;
  sc.patch_nx = 3;
  sc.patch_ny = 3;
  sc.field_dim = 32;
  sc.field_dim_z = 64;
  return sc;
}

}  // namespace

TEST_CASE("tracking runs sample within the configured ranges and settle fast") {
  AblationFrame frame;
  BeamParams beam;
  const Test1Spec spec = small_test1();
  const Test1Report rep = run_test1(spec, frame, beam, 42);
  REQUIRE(rep.runs.size() == 6);
  for (const Test1Run& run : rep.runs) {
    CHECK(std::abs(run.heading_deg) <= spec.horizontal_range_deg);
    CHECK(std::abs(run.elevation_deg) <= spec.vertical_range_deg);
    CHECK(run.step_err_deg.size() == static_cast<std::size_t>(spec.steps));
    CHECK(run.trace.positions.size() == static_cast<std::size_t>(spec.steps + 1));
    CHECK(std::abs(run.reference.norm() - 1.0) < 1e-12);
  }
  CHECK(rep.pooled_median_err_deg >= 0.0);
  CHECK(rep.pooled_median_err_deg < 5.0);
}

TEST_CASE("tracking is reproducible and thread-count independent") {
  AblationFrame frame;
  BeamParams beam;
  const Test1Spec spec = small_test1();
  const Test1Report a = run_test1(spec, frame, beam, 7, 1);
  const Test1Report b = run_test1(spec, frame, beam, 7, 4);
  CHECK(a.pooled_median_err_deg == b.pooled_median_err_deg);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t r = 0; r < a.runs.size(); ++r) {
    CHECK(a.runs[r].heading_deg == b.runs[r].heading_deg);
    CHECK(a.runs[r].step_err_deg == b.runs[r].step_err_deg);
  }
  const Test1Report c = run_test1(spec, frame, beam, 8, 1);
  CHECK(c.runs[0].heading_deg != a.runs[0].heading_deg);
}

TEST_CASE("bowl fields cover the patch, the standoff and the floor") {
  ScenarioSpec sc;  // reference-scale scenario
  const double standoff = 2.0;
  for (int b = 0; b < sc.bowls; ++b) {
    const BowlField bf = build_bowl_field(sc, b, standoff);
    const GridSpec& spec = bf.phi.spec;
    CHECK(spec.dims[0] == sc.field_dim);
    CHECK(spec.dims[1] == sc.field_dim);
    CHECK(spec.dims[2] <= sc.field_dim_z);
    CHECK(bf.sigma == sc.sigma_of(b));

    const double patch_half = 0.5 * (sc.patch_nx - 1) * sc.patch_spacing;
    CHECK(spec.origin.x() <= sc.apex.x() - patch_half - 1.0);
    CHECK(spec.origin.z() <= sc.apex.z() - sc.amplitude - sc.margin_below + 1e-9);
    // The full top margin is honored unless the vertical voxel cap bites; the
    // patch plane itself must stay inside the grid either way.
    const double z_top = spec.origin.z() + spec.spacing * (spec.dims[2] - 1);
    if (spec.dims[2] < sc.field_dim_z)
      CHECK(z_top >= sc.apex.z() + standoff + sc.margin_above - spec.spacing);
    CHECK(z_top >= sc.apex.z() + standoff);

    CHECK(sample_scalar(bf.phi, sc.apex + Vec3(0.0, 0.0, 0.5)) > 0.0);
    const Vec3 deep_corner = spec.position(2, 2, 1);
    CHECK(sample_scalar(bf.phi, deep_corner) < 0.0);
  }
  CHECK(build_bowl_field(sc, 0, standoff).sigma == sc.sigma_min);
  CHECK(build_bowl_field(sc, sc.bowls - 1, standoff).sigma == sc.sigma_max);
  CHECK_THROWS_AS(build_bowl_field(sc, -1, standoff), InvalidInput);
  CHECK_THROWS_AS(build_bowl_field(sc, sc.bowls, standoff), InvalidInput);
}

TEST_CASE("descent simulation produces one record per bowl, angle and robot") {
  AblationFrame frame;
  BeamParams beam;
  Test2Spec spec;
  spec.scenario = small_scenario();
  const Test2Report rep = run_test2(spec, frame, beam, 2024, 2);

  const int robots_per_run = spec.scenario.patch_nx * spec.scenario.patch_ny;
  const std::size_t expect = static_cast<std::size_t>(spec.scenario.bowls) *
                             spec.scenario.angles * robots_per_run;
  REQUIRE(rep.robots.size() == expect);
  REQUIRE(rep.traces.size() == expect);
  REQUIRE(rep.initial_angles.size() ==
          static_cast<std::size_t>(spec.scenario.bowls) * spec.scenario.angles);
  for (const Angles& a : rep.initial_angles) CHECK(frame.bounds.contains(a));

  std::size_t i = 0;
  for (int b = 0; b < spec.scenario.bowls; ++b)
    for (int a = 0; a < spec.scenario.angles; ++a)
      for (int r = 0; r < robots_per_run; ++r, ++i) {
        CHECK(rep.robots[i].bowl == b);
        CHECK(rep.robots[i].angle == a);
        CHECK(rep.robots[i].robot == r);
        CHECK(rep.robots[i].final_cost ==
              obstacle_cost(rep.robots[i].final_phi, spec.cost));
        CHECK(rep.traces[i].positions.size() ==
              static_cast<std::size_t>(spec.steps + 1));
      }

  CHECK(rep.fraction_low_cost >= 0.0);
  CHECK(rep.fraction_low_cost <= 1.0);
  long low = 0, total = 0;
  for (const Test2Robot& rec : rep.robots)
    if (rec.final_cost <= 0.5) ++low;
  for (long c : rep.histogram) total += c;
  CHECK(total == static_cast<long>(expect));
  CHECK(rep.fraction_low_cost ==
        static_cast<double>(low) / static_cast<double>(expect));
}

TEST_CASE("descent simulation is reproducible and thread-count independent") {
  AblationFrame frame;
  BeamParams beam;
  Test2Spec spec;
  spec.scenario = small_scenario();
  const Test2Report a = run_test2(spec, frame, beam, 9, 1);
  const Test2Report b = run_test2(spec, frame, beam, 9, 3);
  REQUIRE(a.robots.size() == b.robots.size());
  for (std::size_t i = 0; i < a.robots.size(); ++i) {
    CHECK(a.robots[i].final_phi == b.robots[i].final_phi);
    CHECK(a.robots[i].final_cost == b.robots[i].final_cost);
    CHECK(a.robots[i].clamp_events == b.robots[i].clamp_events);
  }
  for (std::size_t k = 0; k < a.traces[0].positions.size(); ++k)
    CHECK(a.traces[0].positions[k] == b.traces[0].positions[k]);
}

TEST_CASE("planning simulation produces one run per bowl and angle") {
  AblationFrame frame;
  BeamParams beam;
  Test3Spec spec;
  spec.scenario = small_scenario();
  spec.max_iters = 60;
  const Test3Report rep = run_test3(spec, frame, beam, 77, 2);

  const std::size_t expect =
      static_cast<std::size_t>(spec.scenario.bowls) * spec.scenario.angles;
  REQUIRE(rep.runs.size() == expect);
  const std::size_t patch_size =
      static_cast<std::size_t>(spec.scenario.patch_nx) * spec.scenario.patch_ny;
  std::size_t i = 0;
  long reduced = 0;
  for (int b = 0; b < spec.scenario.bowls; ++b)
    for (int a = 0; a < spec.scenario.angles; ++a, ++i) {
      const Test3Run& run = rep.runs[i];
      CHECK(run.bowl == b);
      CHECK(run.angle == a);
      REQUIRE(!run.cost_trace.empty());
      CHECK(run.cost_trace.front() == run.initial_cost);
      CHECK(run.cost_trace.back() == run.final_cost);
      CHECK(run.before.size() == patch_size);
      CHECK(run.after.size() == patch_size);
      CHECK(frame.bounds.contains(run.theta_star));
      if (run.final_cost <= run.initial_cost) ++reduced;
    }
  CHECK(rep.fraction_reduced ==
        static_cast<double>(reduced) / static_cast<double>(expect));
  long total = 0;
  for (long c : rep.histogram_final) total += c;
  CHECK(total == static_cast<long>(expect));
}

TEST_CASE("planning simulation is reproducible") {
  AblationFrame frame;
  BeamParams beam;
  Test3Spec spec;
  spec.scenario = small_scenario();
  spec.max_iters = 40;
  const Test3Report a = run_test3(spec, frame, beam, 5, 1);
  const Test3Report b = run_test3(spec, frame, beam, 5, 2);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].theta_star.vec() == b.runs[i].theta_star.vec());
    CHECK(a.runs[i].cost_trace == b.runs[i].cost_trace);
    CHECK(a.runs[i].termination == b.runs[i].termination);
  }
}

TEST_CASE("simulation spec validation") {
  Test1Spec t1 = small_test1();
  t1.transient_steps = t1.steps;
  CHECK_THROWS_AS(t1.validate(), InvalidInput);

  Test2Spec t2;
  t2.standoff = -0.1;
  CHECK_THROWS_AS(t2.validate(), InvalidInput);

  ScenarioSpec sc;
  sc.field_dim = 4;
  CHECK_THROWS_AS(sc.validate(), InvalidInput);

  Test3Spec t3;
  t3.select_fraction = 1.5;
  CHECK_THROWS_AS(t3.validate(), InvalidInput);
}
