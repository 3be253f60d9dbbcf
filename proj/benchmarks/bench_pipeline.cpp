#include <benchmark/benchmark.h>

#include <vector>

#include "ablate/calibration.hpp"
#include "ablate/field.hpp"
#include "ablate/planner.hpp"

namespace {

using namespace ablate;

GridSpec cube_spec(int n) {
  GridSpec spec;
  spec.origin = Vec3(-3.0, -3.0, -2.9);
  spec.spacing = 6.0 / (n - 1);
  spec.dims = {n, n, n};
  return spec;
}

Occupancy bowl_occupancy(int n) {
  GaussianBowl bowl;
  bowl.apex = Vec3(0.0, 0.25, 0.0);
  bowl.amplitude = 1.4;
  bowl.sigma = 0.6;
  return occupancy_from_boundary(cube_spec(n),
                                 [&](const Vec3& p) { return bowl.inside(p); });
}

struct Scene {
  AblationFrame frame;
  BeamParams beam;
  CostParams cost;
  PointSet patch;
  ScalarField3 phi;
  VectorField3 grad;
};

const Scene& scene() {
  static const Scene s = [] {
    Scene sc;
    sc.frame.center = Vec3(0.0, 0.0, 0.25);
    sc.patch = make_grid_patch(7, 7, 0.3, sc.frame.center);
    sc.phi = signed_edt(bowl_occupancy(64));
    sc.grad = sobel_gradient(sc.phi);
    return sc;
  }();
  return s;
}

void bm_occupancy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bowl_occupancy(n));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(bm_occupancy)->Arg(32)->Arg(64);

void bm_signed_edt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Occupancy occ = bowl_occupancy(n);
  for (auto _ : state) benchmark::DoNotOptimize(signed_edt(occ));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(bm_signed_edt)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_sobel_gradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ScalarField3 phi = signed_edt(bowl_occupancy(n));
  for (auto _ : state) benchmark::DoNotOptimize(sobel_gradient(phi));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(bm_sobel_gradient)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_sample_scalar(benchmark::State& state) {
  const Scene& s = scene();
  const Vec3 p(0.1, 0.2, -0.4);
  for (auto _ : state) benchmark::DoNotOptimize(sample_scalar(s.phi, p));
}
BENCHMARK(bm_sample_scalar);

void bm_objective_value(benchmark::State& state) {
  const Scene& s = scene();
  const Angles a = Angles::from_degrees(10.0, 0.0, 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        objective_value(s.patch, a, s.frame, s.beam, s.phi, s.cost));
  state.SetItemsProcessed(state.iterations() * s.patch.size());
}
BENCHMARK(bm_objective_value);

void bm_objective_gradient(benchmark::State& state) {
  const Scene& s = scene();
  const Angles a = Angles::from_degrees(10.0, 0.0, 0.0);
  std::vector<int> active(s.patch.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);
  for (auto _ : state)
    benchmark::DoNotOptimize(objective_gradient(s.patch, a, s.frame, s.beam,
                                                s.phi, s.grad, s.cost, active));
  state.SetItemsProcessed(state.iterations() * s.patch.size());
}
BENCHMARK(bm_objective_gradient);

void bm_select_active(benchmark::State& state) {
  const Scene& s = scene();
  const Angles cur = Angles::from_degrees(10.0, 0.0, 0.0);
  const Angles cand = Angles::from_degrees(10.5, 0.0, 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        select_active(s.patch, cur, cand, s.frame, s.beam, s.phi, s.cost, 0.30));
}
BENCHMARK(bm_select_active);

void bm_plan(benchmark::State& state) {
  const Scene& s = scene();
  PlannerConfig cfg;
  cfg.step_size = 0.01;
  cfg.max_iters = 50;
  cfg.stall_iters = cfg.max_iters;  // fixed-length run, comparable across changes
  for (auto _ : state)
    benchmark::DoNotOptimize(
        plan(s.patch, s.frame, s.beam, s.phi, s.grad, s.cost, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.max_iters);
}
BENCHMARK(bm_plan)->Unit(benchmark::kMillisecond);

void bm_robot_trace(benchmark::State& state) {
  const Scene& s = scene();
  TraceConfig cfg;
  cfg.steps = 30;
  for (auto _ : state)
    benchmark::DoNotOptimize(point_robot_trace(Vec3(0.3, 0.3, 0.8), Angles{},
                                               s.frame, s.beam, &s.phi, &s.grad,
                                               cfg));
  state.SetItemsProcessed(state.iterations() * cfg.steps);
}
BENCHMARK(bm_robot_trace);

void bm_fit_gaussian(benchmark::State& state) {
  AblationFrame frame;
  BeamParams beam;
  CalibPatch patch;
  PointSet pre;
  const CavityMeasurement m =
      synthesize_cavity(Angles{}, frame, beam, patch, 0.01, 7, &pre);
  const std::vector<ProjectedSample> samples = project_measurement(m, pre, frame);
  for (auto _ : state) benchmark::DoNotOptimize(fit_gaussian(samples));
  state.SetItemsProcessed(state.iterations() * samples.size());
}
BENCHMARK(bm_fit_gaussian);

}  // namespace

BENCHMARK_MAIN();
