#include "ablate/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ablate/parallel.hpp"

namespace ablate {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Unsigned angle (degrees) between the XY-plane projections of u and w.
double xy_angle_deg(const Vec3& u, const Vec3& w) {
  const double nu = std::hypot(u.x(), u.y());
  const double nw = std::hypot(w.x(), w.y());
  if (nu < 1e-15 && nw < 1e-15) return 0.0;
  if (nu < 1e-15 || nw < 1e-15) return 90.0;
  const double cross = u.x() * w.y() - u.y() * w.x();
  const double dot = u.x() * w.x() + u.y() * w.y();
  return rad2deg(std::atan2(std::abs(cross), dot));
}

std::vector<long> cost_histogram(const std::vector<double>& costs, double bin) {
  constexpr int kBins = 61;  // last bin collects everything past the range
  std::vector<long> h(kBins, 0);
  for (double c : costs) {
    const int idx = std::min(static_cast<int>(std::floor(c / bin)), kBins - 1);
    ++h[std::max(idx, 0)];
  }
  return h;
}

std::vector<Angles> sample_box_angles(int count, const AngleBounds& bounds,
                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(bounds.lo.x, bounds.hi.x);
  std::uniform_real_distribution<double> uy(bounds.lo.y, bounds.hi.y);
  std::uniform_real_distribution<double> uz(bounds.lo.z, bounds.hi.z);
  std::vector<Angles> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Angles a;
    a.x = ux(rng);
    a.y = uy(rng);
    a.z = uz(rng);
    out.push_back(a);
  }
  return out;
}

}  // namespace

void Test1Spec::validate() const {
  if (runs < 1 || steps < 1) throw InvalidInput("test1 needs runs >= 1, steps >= 1");
  if (!(step_size > 0.0)) throw InvalidInput("test1 step size must be positive");
  if (!(horizontal_range_deg > 0.0 && horizontal_range_deg <= 180.0))
    throw InvalidInput("test1 horizontal range must be in (0, 180]");
  if (!(vertical_range_deg >= 0.0 && vertical_range_deg < 90.0))
    throw InvalidInput("test1 vertical range must be in [0, 90)");
  if (transient_steps < 0 || transient_steps >= steps)
    throw InvalidInput("test1 transient must be < steps");
}

Test1Report run_test1(const Test1Spec& spec, const AblationFrame& frame,
                      const BeamParams& beam, std::uint64_t seed, int threads) {
  spec.validate();
  frame.validate();
  beam.validate();

  Test1Report rep;
  rep.spec = spec;
  rep.runs.resize(spec.runs);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> heading(-spec.horizontal_range_deg,
                                                 spec.horizontal_range_deg);
  std::uniform_real_distribution<double> elevation(-spec.vertical_range_deg,
                                                   spec.vertical_range_deg);
  for (int r = 0; r < spec.runs; ++r) {
    rep.runs[r].run = r;
    rep.runs[r].heading_deg = heading(rng);
    rep.runs[r].elevation_deg = elevation(rng);
  }

  parallel_for(spec.runs, threads, [&](int r) {
    Test1Run& run = rep.runs[r];
    const double h = deg2rad(run.heading_deg);
    const double e = deg2rad(run.elevation_deg);
    run.reference = Vec3(std::cos(e) * std::cos(h), std::cos(e) * std::sin(h),
                         std::sin(e));
    TraceConfig cfg;
    cfg.rule = TraceRule::follow_reference;
    cfg.steps = spec.steps;
    cfg.step_size = spec.step_size;
    cfg.reference = run.reference;
    run.trace = point_robot_trace(frame.center, Angles{}, frame, beam, nullptr,
                                  nullptr, cfg);
    run.step_err_deg.reserve(spec.steps);
    for (int k = 0; k < spec.steps; ++k) {
      const Vec3 disp = run.trace.positions[k + 1] - run.trace.positions[k];
      run.step_err_deg.push_back(xy_angle_deg(run.reference, disp));
    }
    std::vector<double> settled(run.step_err_deg.begin() + spec.transient_steps,
                                run.step_err_deg.end());
    run.median_err_deg = median_of(settled);
    run.mean_err_deg = settled.empty()
                           ? 0.0
                           : std::accumulate(settled.begin(), settled.end(), 0.0) /
                                 static_cast<double>(settled.size());
  });

  std::vector<double> pooled;
  for (const Test1Run& run : rep.runs)
    pooled.insert(pooled.end(), run.step_err_deg.begin() + spec.transient_steps,
                  run.step_err_deg.end());
  rep.pooled_median_err_deg = median_of(std::move(pooled));
  return rep;
}

void ScenarioSpec::validate() const {
  if (bowls < 1) throw InvalidInput("scenario needs at least one bowl");
  if (!(sigma_min > 0.0 && sigma_max >= sigma_min))
    throw InvalidInput("scenario sigma range invalid");
  if (!(amplitude > 0.0)) throw InvalidInput("scenario amplitude must be positive");
  if (angles < 1) throw InvalidInput("scenario needs at least one angle");
  if (patch_nx < 1 || patch_ny < 1 || !(patch_spacing > 0.0))
    throw InvalidInput("scenario patch invalid");
  if (field_dim < 8) throw InvalidInput("scenario field_dim must be >= 8");
  if (field_dim_z < 2) throw InvalidInput("scenario field_dim_z must be >= 2");
  if (!(span_floor > 0.0) || !(margin_below > 0.0) || !(margin_above > 0.0))
    throw InvalidInput("scenario extents must be positive");
}

double ScenarioSpec::sigma_of(int bowl) const {
  if (bowls == 1) return sigma_min;
  return sigma_min + (sigma_max - sigma_min) * bowl / (bowls - 1);
}

BowlField build_bowl_field(const ScenarioSpec& scenario, int bowl, double standoff) {
  scenario.validate();
  if (bowl < 0 || bowl >= scenario.bowls) throw InvalidInput("bowl index out of range");
  BowlField bf;
  bf.sigma = scenario.sigma_of(bowl);

  const double patch_half =
      0.5 * std::max(scenario.patch_nx - 1, scenario.patch_ny - 1) *
      scenario.patch_spacing;
  const double half = std::max({3.0 * bf.sigma, 0.5 * scenario.span_floor,
                                patch_half + 1.0});
  GridSpec spec;
  spec.spacing = 2.0 * half / (scenario.field_dim - 1);
  const double z_lo = scenario.apex.z() - scenario.amplitude - scenario.margin_below;
  const double z_hi = scenario.apex.z() + standoff + scenario.margin_above;
  const int nz = std::clamp(
      static_cast<int>(std::ceil((z_hi - z_lo) / spec.spacing)) + 1, 2,
      scenario.field_dim_z);
  spec.dims = {scenario.field_dim, scenario.field_dim, nz};
  spec.origin = Vec3(scenario.apex.x() - half, scenario.apex.y() - half, z_lo);

  GaussianBowl bowl_fn;
  bowl_fn.apex = scenario.apex;
  bowl_fn.amplitude = scenario.amplitude;
  bowl_fn.sigma = bf.sigma;
  const Occupancy occ = occupancy_from_boundary(
      spec, [&](const Vec3& p) { return bowl_fn.inside(p); });
  bf.phi = signed_edt(occ);
  bf.grad_phi = sobel_gradient(bf.phi);
  return bf;
}

void Test2Spec::validate() const {
  scenario.validate();
  if (!(standoff >= 0.0)) throw InvalidInput("test2 standoff must be >= 0");
  if (steps < 1) throw InvalidInput("test2 steps must be >= 1");
  if (!(step_size > 0.0)) throw InvalidInput("test2 step size must be positive");
  cost.validate();
}

Test2Report run_test2(const Test2Spec& spec, const AblationFrame& frame,
                      const BeamParams& beam, std::uint64_t seed, int threads) {
  spec.validate();
  frame.validate();
  beam.validate();

  Test2Report rep;
  rep.spec = spec;
  std::mt19937_64 rng(seed);
  for (int b = 0; b < spec.scenario.bowls; ++b) {
    const std::vector<Angles> batch =
        sample_box_angles(spec.scenario.angles, frame.bounds, rng);
    rep.initial_angles.insert(rep.initial_angles.end(), batch.begin(), batch.end());
  }

  const Vec3 patch_center = spec.scenario.apex + Vec3(0.0, 0.0, spec.standoff);
  const PointSet patch =
      make_grid_patch(spec.scenario.patch_nx, spec.scenario.patch_ny,
                      spec.scenario.patch_spacing, patch_center);
  const int robots_per_run = static_cast<int>(patch.size());
  const int per_bowl = spec.scenario.angles * robots_per_run;
  rep.robots.resize(static_cast<std::size_t>(spec.scenario.bowls) * per_bowl);
  rep.traces.resize(rep.robots.size());

  for (int b = 0; b < spec.scenario.bowls; ++b) {
    const BowlField field = build_bowl_field(spec.scenario, b, spec.standoff);
    parallel_for(per_bowl, threads, [&, b](int slot) {
      const int a = slot / robots_per_run;
      const int r = slot % robots_per_run;
      const std::size_t out = static_cast<std::size_t>(b) * per_bowl + slot;
      TraceConfig cfg;
      cfg.rule = TraceRule::descend_cost;
      cfg.steps = spec.steps;
      cfg.step_size = spec.step_size;
      cfg.cost = spec.cost;
      const Angles theta0 = rep.initial_angles[b * spec.scenario.angles + a];
      RobotTrace tr = point_robot_trace(patch.points[r], theta0, frame, beam,
                                        &field.phi, &field.grad_phi, cfg);
      Test2Robot& rec = rep.robots[out];
      rec.bowl = b;
      rec.angle = a;
      rec.robot = r;
      rec.clamp_events = tr.clamp_events;
      rec.final_phi = sample_scalar(field.phi, tr.positions.back());
      rec.final_cost = obstacle_cost(rec.final_phi, spec.cost);
      rep.traces[out] = std::move(tr);
    });
  }

  std::vector<double> costs;
  costs.reserve(rep.robots.size());
  long low = 0;
  for (const Test2Robot& rec : rep.robots) {
    costs.push_back(rec.final_cost);
    if (rec.final_cost <= 0.5) ++low;
  }
  rep.fraction_low_cost =
      static_cast<double>(low) / static_cast<double>(rep.robots.size());
  rep.histogram = cost_histogram(costs, rep.hist_bin);
  return rep;
}

void Test3Spec::validate() const {
  scenario.validate();
  if (!(standoff >= 0.0)) throw InvalidInput("test3 standoff must be >= 0");
  if (!(step_size > 0.0)) throw InvalidInput("test3 step size must be positive");
  if (max_iters < 1) throw InvalidInput("test3 max_iters must be >= 1");
  if (!(select_fraction > 0.0 && select_fraction <= 1.0))
    throw InvalidInput("test3 select_fraction must be in (0, 1]");
  if (!(cost_tol > 0.0) || stall_iters < 1)
    throw InvalidInput("test3 stall settings invalid");
  cost.validate();
}

Test3Report run_test3(const Test3Spec& spec, const AblationFrame& frame,
                      const BeamParams& beam, std::uint64_t seed, int threads) {
  spec.validate();
  frame.validate();
  beam.validate();

  Test3Report rep;
  rep.spec = spec;
  std::mt19937_64 rng(seed);
  std::vector<Angles> initial_angles;
  for (int b = 0; b < spec.scenario.bowls; ++b) {
    const std::vector<Angles> batch =
        sample_box_angles(spec.scenario.angles, frame.bounds, rng);
    initial_angles.insert(initial_angles.end(), batch.begin(), batch.end());
  }

  const Vec3 patch_center = spec.scenario.apex + Vec3(0.0, 0.0, spec.standoff);
  const PointSet patch =
      make_grid_patch(spec.scenario.patch_nx, spec.scenario.patch_ny,
                      spec.scenario.patch_spacing, patch_center);
  AblationFrame run_frame = frame;
  run_frame.center = patch_center;

  rep.runs.resize(static_cast<std::size_t>(spec.scenario.bowls) *
                  spec.scenario.angles);
  for (int b = 0; b < spec.scenario.bowls; ++b) {
    const BowlField field = build_bowl_field(spec.scenario, b, spec.standoff);
    parallel_for(spec.scenario.angles, threads, [&, b](int a) {
      const std::size_t out =
          static_cast<std::size_t>(b) * spec.scenario.angles + a;
      PlannerConfig cfg;
      cfg.step_size = spec.step_size;
      cfg.max_iters = spec.max_iters;
      cfg.theta_init = initial_angles[out];
      cfg.bounds = frame.bounds;
      cfg.select_fraction = spec.select_fraction;
      cfg.cost_tol = spec.cost_tol;
      cfg.stall_iters = spec.stall_iters;
      const PlanResult plan_res = plan(patch, run_frame, beam, field.phi,
                                       field.grad_phi, spec.cost, cfg);
      Test3Run& run = rep.runs[out];
      run.bowl = b;
      run.angle = a;
      run.theta_init = cfg.theta_init;
      run.theta_star = plan_res.theta_star;
      run.initial_cost = plan_res.cost_trace.front();
      run.final_cost = plan_res.cost_trace.back();
      run.termination = plan_res.termination;
      run.clamp_events = plan_res.clamp_events;
      run.cost_trace = plan_res.cost_trace;
      run.before = patch;
      run.after = ablate_set(patch, plan_res.theta_star, run_frame, beam);
    });
  }

  std::vector<double> finals;
  finals.reserve(rep.runs.size());
  long reduced = 0;
  for (const Test3Run& run : rep.runs) {
    finals.push_back(run.final_cost);
    if (run.final_cost <= run.initial_cost) ++reduced;
  }
  rep.fraction_reduced =
      static_cast<double>(reduced) / static_cast<double>(rep.runs.size());
  rep.histogram_final = cost_histogram(finals, rep.hist_bin);
  return rep;
}

}  // namespace ablate
