// Command-line front end: calibrate beam parameters from measured cavities,
// build signed distance fields, validate derivatives, plan a constrained
// orientation, and run the three simulation studies. All configuration comes
// from a JSON file with strict key checking; every run echoes the fully
// resolved configuration next to its outputs so reruns are reproducible.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ablate/gradcheck.hpp"
#include "ablate/io.hpp"
#include "ablate/sim.hpp"

namespace fs = std::filesystem;
using ablate::io::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240915;

// ---- strict config access -------------------------------------------------

[[noreturn]] void fail(const std::string& msg) {
  throw ablate::InvalidInput(msg);
}

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& ctx) {
  if (!j.is_object()) fail("config: '" + ctx + "' must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      fail("config: unknown key '" + ctx + item.key() + "'");
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_num(const json& j, const char* key, double dflt,
               const std::string& ctx) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_number()) fail("config: '" + ctx + key + "' must be a number");
  return v->get<double>();
}

int get_int(const json& j, const char* key, int dflt, const std::string& ctx) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_number_integer())
    fail("config: '" + ctx + key + "' must be an integer");
  return v->get<int>();
}

bool get_bool(const json& j, const char* key, bool dflt,
              const std::string& ctx) {
  const json* v = find(j, key);
  if (!v) return dflt;
  if (!v->is_boolean()) fail("config: '" + ctx + key + "' must be a boolean");
  return v->get<bool>();
}

std::string get_str(const json& j, const char* key, const std::string& ctx) {
  const json* v = find(j, key);
  if (!v || !v->is_string())
    fail("config: '" + ctx + key + "' must be a string");
  return v->get<std::string>();
}

ablate::Vec3 as_vec3(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number())
    fail("config: '" + ctx + "' must be an array of 3 numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

ablate::Vec3 get_vec3(const json& j, const char* key, const ablate::Vec3& dflt,
                      const std::string& ctx) {
  const json* v = find(j, key);
  return v ? as_vec3(*v, ctx + key) : dflt;
}

json vec3_json(const ablate::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// ---- shared sub-configs ---------------------------------------------------

ablate::AblationFrame parse_frame(const json* j, json& resolved) {
  ablate::AblationFrame frame;
  if (j) {
    require_keys(*j, {"center", "direction", "ref_length", "bounds_deg"},
                 "frame.");
    frame.center = get_vec3(*j, "center", frame.center, "frame.");
    frame.base_dir = get_vec3(*j, "direction", frame.base_dir, "frame.");
    frame.ref_length = get_num(*j, "ref_length", frame.ref_length, "frame.");
    if (const json* b = find(*j, "bounds_deg")) {
      require_keys(*b, {"lo", "hi"}, "frame.bounds_deg.");
      const ablate::Vec3 lo =
          get_vec3(*b, "lo", frame.bounds.lo.degrees(), "frame.bounds_deg.");
      const ablate::Vec3 hi =
          get_vec3(*b, "hi", frame.bounds.hi.degrees(), "frame.bounds_deg.");
      frame.bounds.lo = ablate::Angles::from_degrees(lo.x(), lo.y(), lo.z());
      frame.bounds.hi = ablate::Angles::from_degrees(hi.x(), hi.y(), hi.z());
    }
  }
  frame.validate();
  resolved["frame"] = {{"center", vec3_json(frame.center)},
                       {"direction", vec3_json(frame.base_dir)},
                       {"ref_length", frame.ref_length},
                       {"bounds_deg",
                        {{"lo", vec3_json(frame.bounds.lo.degrees())},
                         {"hi", vec3_json(frame.bounds.hi.degrees())}}}};
  return frame;
}

ablate::BeamParams parse_beam(const json* j, json& resolved) {
  ablate::BeamParams beam;
  if (j) {
    require_keys(*j, {"L_G", "sigma_G", "fit_from"}, "beam.");
    if (find(*j, "fit_from")) {
      if (find(*j, "L_G") || find(*j, "sigma_G"))
        fail("config: 'beam.fit_from' excludes explicit beam values");
      const std::string path = get_str(*j, "fit_from", "beam.");
      const json fit = ablate::io::read_json(path);
      if (!fit.contains("L_G") || !fit.contains("sigma_G"))
        fail("fit file '" + path + "' lacks L_G/sigma_G");
      beam.depth = fit["L_G"].get<double>();
      beam.width = fit["sigma_G"].get<double>();
    } else {
      beam.depth = get_num(*j, "L_G", beam.depth, "beam.");
      beam.width = get_num(*j, "sigma_G", beam.width, "beam.");
    }
  }
  beam.validate();
  resolved["beam"] = {{"L_G", beam.depth}, {"sigma_G", beam.width}};
  return beam;
}

ablate::GridSpec parse_grid(const json& j, json& resolved) {
  require_keys(j, {"origin", "spacing", "dims"}, "grid.");
  ablate::GridSpec spec;
  spec.origin = get_vec3(j, "origin", spec.origin, "grid.");
  spec.spacing = get_num(j, "spacing", spec.spacing, "grid.");
  if (const json* d = find(j, "dims")) {
    if (!d->is_array() || d->size() != 3)
      fail("config: 'grid.dims' must be an array of 3 integers");
    for (int i = 0; i < 3; ++i) {
      if (!(*d)[i].is_number_integer())
        fail("config: 'grid.dims' must be an array of 3 integers");
      spec.dims[static_cast<std::size_t>(i)] = (*d)[i].get<int>();
    }
  }
  spec.validate();
  resolved["grid"] = {{"origin", vec3_json(spec.origin)},
                      {"spacing", spec.spacing},
                      {"dims", {spec.dims[0], spec.dims[1], spec.dims[2]}}};
  return spec;
}

std::function<bool(const ablate::Vec3&)> parse_boundary(const json& j,
                                                        json& resolved) {
  const std::string type = get_str(j, "type", "boundary.");
  if (type == "gaussian_bowl") {
    require_keys(j, {"type", "apex", "amplitude", "sigma_b"}, "boundary.");
    ablate::GaussianBowl bowl;
    bowl.apex = get_vec3(j, "apex", bowl.apex, "boundary.");
    bowl.amplitude = get_num(j, "amplitude", bowl.amplitude, "boundary.");
    bowl.sigma = get_num(j, "sigma_b", bowl.sigma, "boundary.");
    if (!(bowl.amplitude > 0.0) || !(bowl.sigma > 0.0))
      fail("config: bowl amplitude and sigma_b must be positive");
    resolved["boundary"] = {{"type", type},
                            {"apex", vec3_json(bowl.apex)},
                            {"amplitude", bowl.amplitude},
                            {"sigma_b", bowl.sigma}};
    return [bowl](const ablate::Vec3& p) { return bowl.inside(p); };
  }
  if (type == "halfspace") {
    require_keys(j, {"type", "normal", "offset"}, "boundary.");
    ablate::HalfSpace hs;
    hs.normal = get_vec3(j, "normal", hs.normal, "boundary.");
    hs.offset = get_num(j, "offset", hs.offset, "boundary.");
    if (hs.normal.norm() < 1e-12) fail("config: halfspace normal is zero");
    resolved["boundary"] = {{"type", type},
                            {"normal", vec3_json(hs.normal)},
                            {"offset", hs.offset}};
    return [hs](const ablate::Vec3& p) { return hs.inside(p); };
  }
  fail("config: boundary type must be 'gaussian_bowl' or 'halfspace'");
}

ablate::CostParams parse_cost(const json* j, json& resolved) {
  ablate::CostParams cost;
  if (j) {
    require_keys(*j, {"epsilon"}, "cost.");
    cost.epsilon = get_num(*j, "epsilon", cost.epsilon, "cost.");
  }
  cost.validate();
  resolved["cost"] = {{"epsilon", cost.epsilon}};
  return cost;
}

// ---- run context ----------------------------------------------------------

struct RunContext {
  json config;
  fs::path out_dir;
  std::uint64_t seed{kDefaultSeed};
  int threads{1};
  json resolved;
};

struct CliOverrides {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

RunContext make_context(const CliOverrides& cli,
                        const std::set<std::string>& verb_keys) {
  RunContext ctx;
  ctx.config = ablate::io::read_json(cli.config_path);
  std::set<std::string> allowed = verb_keys;
  allowed.insert({"out_dir", "seed", "threads"});
  require_keys(ctx.config, allowed, "");

  std::string out = cli.out_dir;
  if (out.empty() && find(ctx.config, "out_dir"))
    out = get_str(ctx.config, "out_dir", "");
  if (out.empty()) fail("no output directory (use --out or config 'out_dir')");
  ctx.out_dir = out;

  if (cli.seed) {
    ctx.seed = *cli.seed;
  } else if (const json* s = find(ctx.config, "seed")) {
    if (!s->is_number_unsigned() && !s->is_number_integer())
      fail("config: 'seed' must be an integer");
    ctx.seed = s->get<std::uint64_t>();
  }
  ctx.threads = cli.threads ? *cli.threads
                            : get_int(ctx.config, "threads", 1, "");
  if (ctx.threads < 1) fail("threads must be >= 1");

  fs::create_directories(ctx.out_dir);
  ctx.resolved["out_dir"] = ctx.out_dir.string();
  ctx.resolved["seed"] = ctx.seed;
  ctx.resolved["threads"] = ctx.threads;
  return ctx;
}

void finish(const RunContext& ctx) {
  ablate::io::write_json(ctx.resolved, ctx.out_dir / "resolved_config.json");
}

// ---- verbs ----------------------------------------------------------------

int cmd_calibrate(const CliOverrides& cli) {
  RunContext ctx = make_context(cli, {"manifest", "max_iters"});
  const std::string manifest_path = get_str(ctx.config, "manifest", "");
  const int max_iters = get_int(ctx.config, "max_iters", 200, "");
  ctx.resolved["manifest"] = manifest_path;
  ctx.resolved["max_iters"] = max_iters;

  const fs::path dir = fs::path(manifest_path).parent_path();
  const json manifest = ablate::io::read_json(manifest_path);
  require_keys(manifest, {"frame", "pre_surface", "angles_deg", "reps"},
               "manifest.");
  json frame_resolved;
  const ablate::AblationFrame frame =
      parse_frame(find(manifest, "frame"), frame_resolved);
  const ablate::PointSet pre = ablate::io::load_pointset_csv(
      dir / get_str(manifest, "pre_surface", "manifest."));
  const json* angles = find(manifest, "angles_deg");
  if (!angles || !angles->is_array() || angles->empty())
    fail("manifest: 'angles_deg' must be a non-empty array");
  const int reps = get_int(manifest, "reps", 1, "manifest.");
  if (reps < 1) fail("manifest: 'reps' must be >= 1");

  std::vector<ablate::CavityMeasurement> measurements;
  for (std::size_t i = 0; i < angles->size(); ++i) {
    const ablate::Vec3 deg =
        as_vec3((*angles)[i], "manifest.angles_deg[" + std::to_string(i) + "]");
    for (int j = 0; j < reps; ++j) {
      ablate::CavityMeasurement m;
      m.theta = ablate::Angles::from_degrees(deg.x(), deg.y(), deg.z());
      m.cloud = ablate::io::load_pointset_csv(
          dir / ("angle_" + std::to_string(i) + "_rep_" + std::to_string(j) +
                 ".csv"));
      measurements.push_back(std::move(m));
    }
  }

  const ablate::FitResult fit =
      ablate::fit_measurements(measurements, pre, frame, max_iters);
  ablate::io::write_json(ablate::io::fit_to_json(fit), ctx.out_dir / "fit.json");
  finish(ctx);
  if (!fit.converged) {
    std::cerr << "calibrate: fit did not converge in " << fit.iterations
              << " iterations\n";
    return 2;
  }
  std::cout << "calibrate: L_G=" << fit.params.depth
            << " sigma_G=" << fit.params.width << " rmse=" << fit.rmse << "\n";
  return 0;
}

int cmd_field(const CliOverrides& cli) {
  RunContext ctx = make_context(cli, {"grid", "boundary"});
  const json* grid_j = find(ctx.config, "grid");
  const json* boundary_j = find(ctx.config, "boundary");
  if (!grid_j || !boundary_j) fail("field config needs 'grid' and 'boundary'");
  const ablate::GridSpec spec = parse_grid(*grid_j, ctx.resolved);
  const auto inside = parse_boundary(*boundary_j, ctx.resolved);

  const ablate::Occupancy occ = ablate::occupancy_from_boundary(spec, inside);
  const ablate::ScalarField3 phi = ablate::signed_edt(occ);
  const ablate::VectorField3 grad = ablate::sobel_gradient(phi);
  ablate::io::save_scalar_field(phi, ctx.out_dir / "phi.json",
                                ctx.out_dir / "phi.csv");
  ablate::io::save_vector_field(grad, ctx.out_dir / "grad_phi.json",
                                ctx.out_dir / "grad_phi.csv");
  finish(ctx);
  std::cout << "field: " << occ.inside_count() << " of " << spec.voxel_count()
            << " voxels inside\n";
  return 0;
}

int cmd_grad_check(const CliOverrides& cli) {
  RunContext ctx = make_context(
      cli, {"trials", "fd_step", "objective_fd_step", "tol_side",
            "tol_dist_sq", "tol_dir", "tol_cut_dir", "tol_cut",
            "tol_objective", "inject_error"});
  ablate::GradCheckConfig cfg;
  cfg.seed = ctx.seed;
  cfg.trials = get_int(ctx.config, "trials", cfg.trials, "");
  cfg.fd_step = get_num(ctx.config, "fd_step", cfg.fd_step, "");
  cfg.objective_fd_step =
      get_num(ctx.config, "objective_fd_step", cfg.objective_fd_step, "");
  cfg.tol_side = get_num(ctx.config, "tol_side", cfg.tol_side, "");
  cfg.tol_dist_sq = get_num(ctx.config, "tol_dist_sq", cfg.tol_dist_sq, "");
  cfg.tol_dir = get_num(ctx.config, "tol_dir", cfg.tol_dir, "");
  cfg.tol_cut_dir = get_num(ctx.config, "tol_cut_dir", cfg.tol_cut_dir, "");
  cfg.tol_cut = get_num(ctx.config, "tol_cut", cfg.tol_cut, "");
  cfg.tol_objective =
      get_num(ctx.config, "tol_objective", cfg.tol_objective, "");
  cfg.inject_error = get_bool(ctx.config, "inject_error", false, "");
  ctx.resolved["trials"] = cfg.trials;
  ctx.resolved["fd_step"] = cfg.fd_step;
  ctx.resolved["objective_fd_step"] = cfg.objective_fd_step;
  ctx.resolved["tol_side"] = cfg.tol_side;
  ctx.resolved["tol_dist_sq"] = cfg.tol_dist_sq;
  ctx.resolved["tol_dir"] = cfg.tol_dir;
  ctx.resolved["tol_cut_dir"] = cfg.tol_cut_dir;
  ctx.resolved["tol_cut"] = cfg.tol_cut;
  ctx.resolved["tol_objective"] = cfg.tol_objective;
  ctx.resolved["inject_error"] = cfg.inject_error;

  const ablate::GradCheckResult res = ablate::run_grad_check(cfg);
  ablate::io::save_grad_check_csv(res, ctx.out_dir / "grad_check.csv");
  json summary = {{"passed", res.passed},
                  {"worst",
                   {{"side_b", res.worst.side_b},
                    {"dist_sq", res.worst.dist_sq},
                    {"dir", res.worst.dir},
                    {"cut_dir", res.worst.cut_dir},
                    {"cut", res.worst.cut},
                    {"objective", res.worst.objective}}}};
  ablate::io::write_json(summary, ctx.out_dir / "grad_check.json");
  finish(ctx);
  if (!res.passed) {
    std::cerr << "grad-check: tolerance exceeded (worst objective rel err "
              << res.worst.objective << ")\n";
    return 3;
  }
  std::cout << "grad-check: " << cfg.trials << " configurations ok\n";
  return 0;
}

int cmd_plan(const CliOverrides& cli) {
  RunContext ctx = make_context(
      cli, {"frame", "beam", "points", "grid", "boundary", "field", "cost",
            "planner"});
  const ablate::AblationFrame frame =
      parse_frame(find(ctx.config, "frame"), ctx.resolved);
  const ablate::BeamParams beam =
      parse_beam(find(ctx.config, "beam"), ctx.resolved);
  const ablate::CostParams cost = parse_cost(find(ctx.config, "cost"), ctx.resolved);

  ablate::PointSet points;
  const json* pts = find(ctx.config, "points");
  if (!pts) fail("plan config needs 'points'");
  if (pts->is_string()) {
    points = ablate::io::load_pointset_csv(pts->get<std::string>());
    ctx.resolved["points"] = pts->get<std::string>();
  } else {
    require_keys(*pts, {"nx", "ny", "spacing", "center"}, "points.");
    const int nx = get_int(*pts, "nx", 7, "points.");
    const int ny = get_int(*pts, "ny", 7, "points.");
    const double spacing = get_num(*pts, "spacing", 0.4, "points.");
    const ablate::Vec3 center =
        get_vec3(*pts, "center", frame.center, "points.");
    points = ablate::make_grid_patch(nx, ny, spacing, center);
    ctx.resolved["points"] = {{"nx", nx},
                              {"ny", ny},
                              {"spacing", spacing},
                              {"center", vec3_json(center)}};
  }

  ablate::ScalarField3 phi;
  ablate::VectorField3 grad;
  if (const json* field_j = find(ctx.config, "field")) {
    if (find(ctx.config, "grid") || find(ctx.config, "boundary"))
      fail("config: 'field' excludes 'grid'/'boundary'");
    require_keys(*field_j, {"phi", "grad_phi"}, "field.");
    const std::string phi_path = get_str(*field_j, "phi", "field.");
    const std::string grad_path = get_str(*field_j, "grad_phi", "field.");
    phi = ablate::io::load_scalar_field(phi_path);
    grad = ablate::io::load_vector_field(grad_path);
    ctx.resolved["field"] = {{"phi", phi_path}, {"grad_phi", grad_path}};
  } else {
    const json* grid_j = find(ctx.config, "grid");
    const json* boundary_j = find(ctx.config, "boundary");
    if (!grid_j || !boundary_j)
      fail("plan config needs 'field' or 'grid' + 'boundary'");
    const ablate::GridSpec spec = parse_grid(*grid_j, ctx.resolved);
    const auto inside = parse_boundary(*boundary_j, ctx.resolved);
    phi = ablate::signed_edt(ablate::occupancy_from_boundary(spec, inside));
    grad = ablate::sobel_gradient(phi);
  }

  ablate::PlannerConfig pcfg;
  pcfg.bounds = frame.bounds;
  if (const json* p = find(ctx.config, "planner")) {
    require_keys(*p,
                 {"step_size", "max_iters", "theta_init_deg", "select_fraction",
                  "cost_tol", "stall_iters", "record_trajectories"},
                 "planner.");
    pcfg.step_size = get_num(*p, "step_size", pcfg.step_size, "planner.");
    pcfg.max_iters = get_int(*p, "max_iters", pcfg.max_iters, "planner.");
    const ablate::Vec3 init =
        get_vec3(*p, "theta_init_deg", ablate::Vec3::Zero(), "planner.");
    pcfg.theta_init = ablate::Angles::from_degrees(init.x(), init.y(), init.z());
    pcfg.select_fraction =
        get_num(*p, "select_fraction", pcfg.select_fraction, "planner.");
    pcfg.cost_tol = get_num(*p, "cost_tol", pcfg.cost_tol, "planner.");
    pcfg.stall_iters = get_int(*p, "stall_iters", pcfg.stall_iters, "planner.");
    pcfg.record_trajectories =
        get_bool(*p, "record_trajectories", false, "planner.");
  }
  ctx.resolved["planner"] = {
      {"step_size", pcfg.step_size},
      {"max_iters", pcfg.max_iters},
      {"theta_init_deg", vec3_json(pcfg.theta_init.degrees())},
      {"select_fraction", pcfg.select_fraction},
      {"cost_tol", pcfg.cost_tol},
      {"stall_iters", pcfg.stall_iters},
      {"record_trajectories", pcfg.record_trajectories}};

  const ablate::PlanResult res =
      ablate::plan(points, frame, beam, phi, grad, cost, pcfg);
  ablate::io::write_json(ablate::io::plan_to_json(res),
                         ctx.out_dir / "plan.json");
  ablate::io::save_cost_trace_csv(res.cost_trace,
                                  ctx.out_dir / "cost_trace.csv");
  for (std::size_t i = 0; i < res.trajectories.size(); ++i)
    ablate::io::save_pointset_csv(
        res.trajectories[i],
        ctx.out_dir / ("cloud_" + std::to_string(i) + ".csv"));
  finish(ctx);
  std::cout << "plan: " << ablate::io::termination_name(res.termination)
            << " cost " << res.cost_trace.front() << " -> "
            << res.cost_trace.back() << "\n";
  return 0;
}

ablate::ScenarioSpec parse_scenario(const json* j, json& resolved) {
  ablate::ScenarioSpec sc;
  if (j) {
    require_keys(*j,
                 {"bowls", "sigma_min", "sigma_max", "amplitude", "apex",
                  "angles", "patch_nx", "patch_ny", "patch_spacing",
                  "field_dim", "field_dim_z", "span_floor", "margin_below",
                  "margin_above"},
                 "scenario.");
    sc.bowls = get_int(*j, "bowls", sc.bowls, "scenario.");
    sc.sigma_min = get_num(*j, "sigma_min", sc.sigma_min, "scenario.");
    sc.sigma_max = get_num(*j, "sigma_max", sc.sigma_max, "scenario.");
    sc.amplitude = get_num(*j, "amplitude", sc.amplitude, "scenario.");
    sc.apex = get_vec3(*j, "apex", sc.apex, "scenario.");
    sc.angles = get_int(*j, "angles", sc.angles, "scenario.");
    sc.patch_nx = get_int(*j, "patch_nx", sc.patch_nx, "scenario.");
    sc.patch_ny = get_int(*j, "patch_ny", sc.patch_ny, "scenario.");
    sc.patch_spacing =
        get_num(*j, "patch_spacing", sc.patch_spacing, "scenario.");
    sc.field_dim = get_int(*j, "field_dim", sc.field_dim, "scenario.");
    sc.field_dim_z = get_int(*j, "field_dim_z", sc.field_dim_z, "scenario.");
    sc.span_floor = get_num(*j, "span_floor", sc.span_floor, "scenario.");
    sc.margin_below = get_num(*j, "margin_below", sc.margin_below, "scenario.");
    sc.margin_above = get_num(*j, "margin_above", sc.margin_above, "scenario.");
  }
  sc.validate();
  resolved["scenario"] = {{"bowls", sc.bowls},
                          {"sigma_min", sc.sigma_min},
                          {"sigma_max", sc.sigma_max},
                          {"amplitude", sc.amplitude},
                          {"apex", vec3_json(sc.apex)},
                          {"angles", sc.angles},
                          {"patch_nx", sc.patch_nx},
                          {"patch_ny", sc.patch_ny},
                          {"patch_spacing", sc.patch_spacing},
                          {"field_dim", sc.field_dim},
                          {"field_dim_z", sc.field_dim_z},
                          {"span_floor", sc.span_floor},
                          {"margin_below", sc.margin_below},
                          {"margin_above", sc.margin_above}};
  return sc;
}

int cmd_simulate(const CliOverrides& cli) {
  RunContext ctx = make_context(
      cli, {"test", "frame", "beam", "test1", "scenario", "test2", "test3"});
  const std::string which = get_str(ctx.config, "test", "");
  ctx.resolved["test"] = which;
  const ablate::AblationFrame frame =
      parse_frame(find(ctx.config, "frame"), ctx.resolved);
  const ablate::BeamParams beam =
      parse_beam(find(ctx.config, "beam"), ctx.resolved);

  if (which == "test1") {
    if (find(ctx.config, "scenario") || find(ctx.config, "test2") ||
        find(ctx.config, "test3"))
      fail("config: test1 takes only the 'test1' section");
    ablate::Test1Spec spec;
    if (const json* j = find(ctx.config, "test1")) {
      require_keys(*j,
                   {"runs", "steps", "step_size", "horizontal_range_deg",
                    "vertical_range_deg", "transient_steps"},
                   "test1.");
      spec.runs = get_int(*j, "runs", spec.runs, "test1.");
      spec.steps = get_int(*j, "steps", spec.steps, "test1.");
      spec.step_size = get_num(*j, "step_size", spec.step_size, "test1.");
      spec.horizontal_range_deg = get_num(*j, "horizontal_range_deg",
                                          spec.horizontal_range_deg, "test1.");
      spec.vertical_range_deg =
          get_num(*j, "vertical_range_deg", spec.vertical_range_deg, "test1.");
      spec.transient_steps =
          get_int(*j, "transient_steps", spec.transient_steps, "test1.");
    }
    spec.validate();
    ctx.resolved["test1"] = {
        {"runs", spec.runs},
        {"steps", spec.steps},
        {"step_size", spec.step_size},
        {"horizontal_range_deg", spec.horizontal_range_deg},
        {"vertical_range_deg", spec.vertical_range_deg},
        {"transient_steps", spec.transient_steps}};
    const ablate::Test1Report rep =
        ablate::run_test1(spec, frame, beam, ctx.seed, ctx.threads);
    ablate::io::write_json(ablate::io::report_to_json(rep),
                           ctx.out_dir / "report.json");
    ablate::io::save_records_csv(rep, ctx.out_dir / "records.csv");
    ablate::io::save_traces(rep, ctx.out_dir);
    finish(ctx);
    std::cout << "test1: pooled median error " << rep.pooled_median_err_deg
              << " deg\n";
    return 0;
  }

  if (which == "test2") {
    if (find(ctx.config, "test1") || find(ctx.config, "test3"))
      fail("config: test2 takes 'scenario' and 'test2' sections");
    ablate::Test2Spec spec;
    spec.scenario = parse_scenario(find(ctx.config, "scenario"), ctx.resolved);
    if (const json* j = find(ctx.config, "test2")) {
      require_keys(*j, {"standoff", "steps", "step_size", "cost"}, "test2.");
      spec.standoff = get_num(*j, "standoff", spec.standoff, "test2.");
      spec.steps = get_int(*j, "steps", spec.steps, "test2.");
      spec.step_size = get_num(*j, "step_size", spec.step_size, "test2.");
      spec.cost = parse_cost(find(*j, "cost"), ctx.resolved);
    } else {
      spec.cost = parse_cost(nullptr, ctx.resolved);
    }
    spec.validate();
    ctx.resolved["test2"] = {{"standoff", spec.standoff},
                             {"steps", spec.steps},
                             {"step_size", spec.step_size},
                             {"epsilon", spec.cost.epsilon}};
    ctx.resolved.erase("cost");
    const ablate::Test2Report rep =
        ablate::run_test2(spec, frame, beam, ctx.seed, ctx.threads);
    ablate::io::write_json(ablate::io::report_to_json(rep),
                           ctx.out_dir / "report.json");
    ablate::io::save_records_csv(rep, ctx.out_dir / "records.csv");
    ablate::io::save_traces(rep, ctx.out_dir);
    finish(ctx);
    std::cout << "test2: fraction with final cost <= 0.5: "
              << rep.fraction_low_cost << "\n";
    return 0;
  }

  if (which == "test3") {
    if (find(ctx.config, "test1") || find(ctx.config, "test2"))
      fail("config: test3 takes 'scenario' and 'test3' sections");
    ablate::Test3Spec spec;
    spec.scenario = parse_scenario(find(ctx.config, "scenario"), ctx.resolved);
    if (const json* j = find(ctx.config, "test3")) {
      require_keys(*j,
                   {"standoff", "step_size", "max_iters", "select_fraction",
                    "cost_tol", "stall_iters", "cost"},
                   "test3.");
      spec.standoff = get_num(*j, "standoff", spec.standoff, "test3.");
      spec.step_size = get_num(*j, "step_size", spec.step_size, "test3.");
      spec.max_iters = get_int(*j, "max_iters", spec.max_iters, "test3.");
      spec.select_fraction =
          get_num(*j, "select_fraction", spec.select_fraction, "test3.");
      spec.cost_tol = get_num(*j, "cost_tol", spec.cost_tol, "test3.");
      spec.stall_iters = get_int(*j, "stall_iters", spec.stall_iters, "test3.");
      spec.cost = parse_cost(find(*j, "cost"), ctx.resolved);
    } else {
      spec.cost = parse_cost(nullptr, ctx.resolved);
    }
    spec.validate();
    ctx.resolved["test3"] = {{"standoff", spec.standoff},
                             {"step_size", spec.step_size},
                             {"max_iters", spec.max_iters},
                             {"select_fraction", spec.select_fraction},
                             {"cost_tol", spec.cost_tol},
                             {"stall_iters", spec.stall_iters},
                             {"epsilon", spec.cost.epsilon}};
    ctx.resolved.erase("cost");
    const ablate::Test3Report rep =
        ablate::run_test3(spec, frame, beam, ctx.seed, ctx.threads);
    ablate::io::write_json(ablate::io::report_to_json(rep),
                           ctx.out_dir / "report.json");
    ablate::io::save_records_csv(rep, ctx.out_dir / "records.csv");
    ablate::io::save_traces(rep, ctx.out_dir);
    finish(ctx);
    std::cout << "test3: fraction with cost reduced: " << rep.fraction_reduced
              << "\n";
    return 0;
  }

  fail("config: 'test' must be 'test1', 'test2' or 'test3'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-beam ablation prediction and laser-orientation planning"};
  app.require_subcommand(1);

  CliOverrides cli;
  int (*run)(const CliOverrides&) = nullptr;

  auto add_verb = [&](const char* name, const char* desc,
                      int (*fn)(const CliOverrides&)) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", cli.config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", cli.out_dir,
                    "output directory (overrides config out_dir)");
    sub->add_option("--seed", cli.seed, "RNG seed (overrides config)");
    sub->add_option("--threads", cli.threads,
                    "worker threads (overrides config)");
    sub->callback([&run, fn] { run = fn; });
  };

  add_verb("calibrate", "fit beam parameters from measured cavities",
           cmd_calibrate);
  add_verb("field", "build a signed distance field and its gradient",
           cmd_field);
  add_verb("grad-check", "finite-difference validation of all derivatives",
           cmd_grad_check);
  add_verb("plan", "optimize the laser orientation for one pulse", cmd_plan);
  add_verb("simulate", "run one of the three simulation studies", cmd_simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return run(cli);
  } catch (const ablate::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
