#include "ablate/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace ablate::io {

namespace {

void ensure_parent(const std::filesystem::path& path) {
  const std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::ofstream open_out(const std::filesystem::path& path) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path.string());
  return in;
}

double parse_double(std::string_view text, const std::filesystem::path& path) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw InvalidInput("bad numeric value '" + std::string(text) + "' in " +
                       path.string());
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string chomp(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
    line.pop_back();
  return line;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void save_pointset_csv(const PointSet& set, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "x,y,z\n";
  for (const Vec3& p : set.points)
    out << format_double(p.x()) << ',' << format_double(p.y()) << ','
        << format_double(p.z()) << '\n';
}

PointSet load_pointset_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || chomp(line) != "x,y,z")
    throw InvalidInput("expected 'x,y,z' header in " + path.string());
  PointSet set;
  while (std::getline(in, line)) {
    line = chomp(line);
    if (line.empty()) continue;
    const std::vector<std::string_view> cells = split_csv(line);
    if (cells.size() != 3)
      throw InvalidInput("expected 3 columns in " + path.string());
    set.points.emplace_back(parse_double(cells[0], path), parse_double(cells[1], path),
                            parse_double(cells[2], path));
  }
  set.validate();
  return set;
}

namespace {

json grid_header(const GridSpec& spec, const std::filesystem::path& csv_path) {
  json j;
  j["origin"] = {spec.origin.x(), spec.origin.y(), spec.origin.z()};
  j["spacing"] = spec.spacing;
  j["dims"] = {spec.dims[0], spec.dims[1], spec.dims[2]};
  j["values"] = csv_path.filename().string();
  return j;
}

GridSpec grid_from_header(const json& j, const std::filesystem::path& path) {
  try {
    GridSpec spec;
    const auto& origin = j.at("origin");
    spec.origin = Vec3(origin.at(0).get<double>(), origin.at(1).get<double>(),
                       origin.at(2).get<double>());
    spec.spacing = j.at("spacing").get<double>();
    const auto& dims = j.at("dims");
    spec.dims = {dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>()};
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw InvalidInput("bad field header " + path.string() + ": " + e.what());
  }
}

std::filesystem::path sibling(const std::filesystem::path& json_path,
                              const std::string& name) {
  return json_path.parent_path() / name;
}

}  // namespace

void save_scalar_field(const ScalarField3& field, const std::filesystem::path& json_path,
                       const std::filesystem::path& csv_path) {
  field.validate();
  write_json(grid_header(field.spec, csv_path), json_path);
  std::ofstream out = open_out(csv_path);
  out << "value\n";
  for (double v : field.values) out << format_double(v) << '\n';
}

ScalarField3 load_scalar_field(const std::filesystem::path& json_path) {
  const json header = read_json(json_path);
  ScalarField3 field;
  field.spec = grid_from_header(header, json_path);
  const std::filesystem::path csv_path =
      sibling(json_path, header.at("values").get<std::string>());
  std::ifstream in = open_in(csv_path);
  std::string line;
  if (!std::getline(in, line) || chomp(line) != "value")
    throw InvalidInput("expected 'value' header in " + csv_path.string());
  field.values.reserve(field.spec.voxel_count());
  while (std::getline(in, line)) {
    line = chomp(line);
    if (line.empty()) continue;
    field.values.push_back(parse_double(line, csv_path));
  }
  if (field.values.size() != field.spec.voxel_count())
    throw InvalidInput("value count does not match dims in " + csv_path.string());
  field.validate();
  return field;
}

void save_vector_field(const VectorField3& field, const std::filesystem::path& json_path,
                       const std::filesystem::path& csv_path) {
  field.validate();
  write_json(grid_header(field.spec, csv_path), json_path);
  std::ofstream out = open_out(csv_path);
  out << "gx,gy,gz\n";
  for (const Vec3& v : field.values)
    out << format_double(v.x()) << ',' << format_double(v.y()) << ','
        << format_double(v.z()) << '\n';
}

VectorField3 load_vector_field(const std::filesystem::path& json_path) {
  const json header = read_json(json_path);
  VectorField3 field;
  field.spec = grid_from_header(header, json_path);
  const std::filesystem::path csv_path =
      sibling(json_path, header.at("values").get<std::string>());
  std::ifstream in = open_in(csv_path);
  std::string line;
  if (!std::getline(in, line) || chomp(line) != "gx,gy,gz")
    throw InvalidInput("expected 'gx,gy,gz' header in " + csv_path.string());
  field.values.reserve(field.spec.voxel_count());
  while (std::getline(in, line)) {
    line = chomp(line);
    if (line.empty()) continue;
    const std::vector<std::string_view> cells = split_csv(line);
    if (cells.size() != 3)
      throw InvalidInput("expected 3 columns in " + csv_path.string());
    field.values.emplace_back(parse_double(cells[0], csv_path),
                              parse_double(cells[1], csv_path),
                              parse_double(cells[2], csv_path));
  }
  if (field.values.size() != field.spec.voxel_count())
    throw InvalidInput("value count does not match dims in " + csv_path.string());
  field.validate();
  return field;
}

json fit_to_json(const FitResult& fit) {
  json j;
  j["L_G"] = fit.params.depth;
  j["sigma_G"] = fit.params.width;
  j["rmse"] = fit.rmse;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j;
}

void save_grad_check_csv(const GradCheckResult& res,
                         const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "trial,side_b,dist_sq,dir,cut_dir,cut,objective\n";
  for (const GradCheckRow& r : res.rows)
    out << r.trial << ',' << format_double(r.side_b) << ','
        << format_double(r.dist_sq) << ',' << format_double(r.dir) << ','
        << format_double(r.cut_dir) << ',' << format_double(r.cut) << ','
        << format_double(r.objective) << '\n';
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::stalled: return "stalled";
    case Termination::max_iters: return "max_iters";
  }
  return "unknown";
}

json plan_to_json(const PlanResult& res) {
  json j;
  j["theta_star_deg"] = {rad2deg(res.theta_star.x), rad2deg(res.theta_star.y),
                         rad2deg(res.theta_star.z)};
  j["termination"] = termination_name(res.termination);
  j["clamp_events"] = res.clamp_events;
  j["iterations"] = static_cast<int>(res.cost_trace.size()) - 1;
  j["initial_cost"] = res.cost_trace.front();
  j["final_cost"] = res.cost_trace.back();
  return j;
}

void save_cost_trace_csv(const std::vector<double>& trace,
                         const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "iter,cost\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out << i << ',' << format_double(trace[i]) << '\n';
}

json report_to_json(const Test1Report& rep) {
  json j;
  j["test"] = "test1";
  j["runs"] = static_cast<int>(rep.runs.size());
  j["steps"] = rep.spec.steps;
  j["transient_steps"] = rep.spec.transient_steps;
  j["pooled_median_xy_error_deg"] = rep.pooled_median_err_deg;
  int under = 0;
  for (const Test1Run& run : rep.runs)
    if (run.median_err_deg < 10.0) ++under;
  j["fraction_runs_under_10deg"] =
      rep.runs.empty() ? 0.0
                       : static_cast<double>(under) / static_cast<double>(rep.runs.size());
  return j;
}

json report_to_json(const Test2Report& rep) {
  json j;
  j["test"] = "test2";
  j["bowls"] = rep.spec.scenario.bowls;
  j["angles_per_bowl"] = rep.spec.scenario.angles;
  j["robots"] = static_cast<int>(rep.robots.size());
  j["fraction_le_0.5"] = rep.fraction_low_cost;
  j["histogram"] = {{"bin_width", rep.hist_bin}, {"counts", rep.histogram}};
  return j;
}

json report_to_json(const Test3Report& rep) {
  json j;
  j["test"] = "test3";
  j["bowls"] = rep.spec.scenario.bowls;
  j["angles_per_bowl"] = rep.spec.scenario.angles;
  j["runs"] = static_cast<int>(rep.runs.size());
  j["fraction_reduced"] = rep.fraction_reduced;
  j["histogram_final"] = {{"bin_width", rep.hist_bin}, {"counts", rep.histogram_final}};
  return j;
}

void save_records_csv(const Test1Report& rep, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "run,heading_deg,elevation_deg,median_err_deg,mean_err_deg\n";
  for (const Test1Run& run : rep.runs)
    out << run.run << ',' << format_double(run.heading_deg) << ','
        << format_double(run.elevation_deg) << ','
        << format_double(run.median_err_deg) << ','
        << format_double(run.mean_err_deg) << '\n';
}

void save_records_csv(const Test2Report& rep, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "bowl,angle,robot,final_phi,final_cost,clamp_events\n";
  for (const Test2Robot& rec : rep.robots)
    out << rec.bowl << ',' << rec.angle << ',' << rec.robot << ','
        << format_double(rec.final_phi) << ',' << format_double(rec.final_cost)
        << ',' << rec.clamp_events << '\n';
}

void save_records_csv(const Test3Report& rep, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "bowl,angle,theta_init_x_deg,theta_init_y_deg,theta_init_z_deg,"
         "theta_star_x_deg,theta_star_y_deg,theta_star_z_deg,"
         "initial_cost,final_cost,termination,iterations,clamp_events\n";
  for (const Test3Run& run : rep.runs) {
    const Vec3 ti = run.theta_init.degrees();
    const Vec3 ts = run.theta_star.degrees();
    out << run.bowl << ',' << run.angle << ',' << format_double(ti.x()) << ','
        << format_double(ti.y()) << ',' << format_double(ti.z()) << ','
        << format_double(ts.x()) << ',' << format_double(ts.y()) << ','
        << format_double(ts.z()) << ',' << format_double(run.initial_cost) << ','
        << format_double(run.final_cost) << ',' << termination_name(run.termination)
        << ',' << static_cast<int>(run.cost_trace.size()) - 1 << ','
        << run.clamp_events << '\n';
  }
}

void save_traces(const Test1Report& rep, const std::filesystem::path& dir) {
  for (const Test1Run& run : rep.runs) {
    std::ofstream out = open_out(dir / ("trace_" + std::to_string(run.run) + ".csv"));
    out << "step,x,y,z,err_deg\n";
    for (std::size_t k = 0; k < run.trace.positions.size(); ++k) {
      const Vec3& p = run.trace.positions[k];
      // Row k holds the error of the displacement that arrived at it.
      const double err = k == 0 ? 0.0 : run.step_err_deg[k - 1];
      out << k << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
          << format_double(p.z()) << ',' << format_double(err) << '\n';
    }
  }
}

void save_traces(const Test2Report& rep, const std::filesystem::path& dir) {
  const int per_run = rep.spec.scenario.patch_nx * rep.spec.scenario.patch_ny;
  const int runs = rep.spec.scenario.bowls * rep.spec.scenario.angles;
  for (int run = 0; run < runs; ++run) {
    std::ofstream out = open_out(dir / ("trace_" + std::to_string(run) + ".csv"));
    out << "robot,step,x,y,z\n";
    for (int r = 0; r < per_run; ++r) {
      const RobotTrace& tr = rep.traces[static_cast<std::size_t>(run) * per_run + r];
      for (std::size_t k = 0; k < tr.positions.size(); ++k) {
        const Vec3& p = tr.positions[k];
        out << r << ',' << k << ',' << format_double(p.x()) << ','
            << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
      }
    }
  }
}

void save_traces(const Test3Report& rep, const std::filesystem::path& dir) {
  for (std::size_t i = 0; i < rep.runs.size(); ++i) {
    const Test3Run& run = rep.runs[i];
    save_cost_trace_csv(run.cost_trace,
                        dir / ("trace_" + std::to_string(i) + ".csv"));
    save_pointset_csv(run.before,
                      dir / ("contour_before_" + std::to_string(i) + ".csv"));
    save_pointset_csv(run.after,
                      dir / ("contour_after_" + std::to_string(i) + ".csv"));
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("bad JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << text;
}

}  // namespace ablate::io
