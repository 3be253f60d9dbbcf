#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ablate/io.hpp"
#include "oracles.hpp"

using namespace ablate;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("ablate_io_test_" + std::to_string(++counter));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("doubles are written in shortest round-trip form") {
  CHECK(io::format_double(0.0) == "0");
  CHECK(io::format_double(1.5) == "1.5");
  CHECK(io::format_double(-2.0) == "-2");
  testutil::Rng rng(601);
  for (int t = 0; t < 1000; ++t) {
    const double v = rng.uni(-1.0, 1.0) * std::pow(10.0, rng.uni(-12.0, 12.0));
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("point sets survive a save/load round trip unchanged") {
  TempDir tmp;
  testutil::Rng rng(602);
  PointSet set;
  for (int i = 0; i < 200; ++i)
    set.points.push_back(rng.vec(-5.0, 5.0) * std::pow(10.0, rng.uni(-6.0, 6.0)));
  const fs::path p = tmp.path / "cloud.csv";
  io::save_pointset_csv(set, p);
  const PointSet back = io::load_pointset_csv(p);
  REQUIRE(back.size() == set.size());
  for (std::size_t i = 0; i < set.size(); ++i)
    CHECK(back.points[i] == set.points[i]);
  CHECK(slurp(p).rfind("x,y,z\n", 0) == 0);
}

TEST_CASE("point set loading rejects malformed files") {
  TempDir tmp;
  CHECK_THROWS_AS(io::load_pointset_csv(tmp.path / "missing.csv"), InvalidInput);
  const fs::path bad_header = tmp.path / "bad_header.csv";
  io::write_text("a,b,c\n1,2,3\n", bad_header);
  CHECK_THROWS_AS(io::load_pointset_csv(bad_header), InvalidInput);
  const fs::path short_row = tmp.path / "short_row.csv";
  io::write_text("x,y,z\n1,2\n", short_row);
  CHECK_THROWS_AS(io::load_pointset_csv(short_row), InvalidInput);
  const fs::path bad_value = tmp.path / "bad_value.csv";
  io::write_text("x,y,z\n1,2,zebra\n", bad_value);
  CHECK_THROWS_AS(io::load_pointset_csv(bad_value), InvalidInput);
}

TEST_CASE("scalar fields survive a save/load round trip unchanged") {
  TempDir tmp;
  testutil::Rng rng(603);
  GridSpec spec;
  spec.origin = Vec3(-1.3, 0.7, 2.9);
  spec.spacing = 0.37;
  spec.dims = {5, 4, 3};
  ScalarField3 f;
  f.spec = spec;
  f.values.resize(spec.voxel_count());
  for (double& v : f.values) v = rng.uni(-10.0, 10.0);

  io::save_scalar_field(f, tmp.path / "phi.json", tmp.path / "phi.csv");
  const ScalarField3 back = io::load_scalar_field(tmp.path / "phi.json");
  CHECK(back.spec.origin == spec.origin);
  CHECK(back.spec.spacing == spec.spacing);
  CHECK(back.spec.dims == spec.dims);
  CHECK(back.values == f.values);
}

TEST_CASE("vector fields survive a save/load round trip unchanged") {
  TempDir tmp;
  testutil::Rng rng(604);
  GridSpec spec;
  spec.origin = Vec3(0.0, -2.0, 1.0);
  spec.spacing = 1.25;
  spec.dims = {3, 3, 4};
  VectorField3 f;
  f.spec = spec;
  f.values.resize(spec.voxel_count());
  for (Vec3& v : f.values) v = rng.vec(-3.0, 3.0);

  io::save_vector_field(f, tmp.path / "grad.json", tmp.path / "grad.csv");
  const VectorField3 back = io::load_vector_field(tmp.path / "grad.json");
  CHECK(back.spec.dims == spec.dims);
  REQUIRE(back.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(back.values[i] == f.values[i]);
}

TEST_CASE("field loading rejects broken headers") {
  TempDir tmp;
  io::write_text("{\"spacing\": 1.0}\n", tmp.path / "no_dims.json");
  CHECK_THROWS_AS(io::load_scalar_field(tmp.path / "no_dims.json"), InvalidInput);
  io::write_text("not json", tmp.path / "garbage.json");
  CHECK_THROWS_AS(io::load_scalar_field(tmp.path / "garbage.json"), InvalidInput);
}

TEST_CASE("fit results serialize with the model parameter names") {
  FitResult fit;
  fit.params = {1.4376, 0.6486};
  fit.rmse = 0.01;
  fit.iterations = 12;
  fit.converged = true;
  const io::json j = io::fit_to_json(fit);
  CHECK(j.at("L_G").get<double>() == 1.4376);
  CHECK(j.at("sigma_G").get<double>() == 0.6486);
  CHECK(j.at("rmse").get<double>() == 0.01);
  CHECK(j.at("iterations").get<int>() == 12);
  CHECK(j.at("converged").get<bool>());
}

TEST_CASE("plan results serialize in degrees with trace endpoints") {
  PlanResult res;
  res.theta_star = Angles::from_degrees(10.0, -5.0, 0.0);
  res.termination = Termination::stalled;
  res.cost_trace = {2.0, 1.0, 0.5};
  res.clamp_events = 3;
  const io::json j = io::plan_to_json(res);
  CHECK(j.at("theta_star_deg")[0].get<double>() == doctest::Approx(10.0));
  CHECK(j.at("termination").get<std::string>() == "stalled");
  CHECK(j.at("iterations").get<int>() == 2);
  CHECK(j.at("initial_cost").get<double>() == 2.0);
  CHECK(j.at("final_cost").get<double>() == 0.5);
  CHECK(j.at("clamp_events").get<int>() == 3);
}

TEST_CASE("cost traces are written one iteration per row") {
  TempDir tmp;
  io::save_cost_trace_csv({1.5, 0.25, 0.0}, tmp.path / "trace.csv");
  CHECK(slurp(tmp.path / "trace.csv") == "iter,cost\n0,1.5\n1,0.25\n2,0\n");
}

TEST_CASE("derivative check rows serialize with one line per trial") {
  TempDir tmp;
  GradCheckResult res;
  res.rows.push_back({0, 1e-10, 2e-10, 3e-10, 4e-10, 5e-10, 6e-10});
  res.rows.push_back({1, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0});
  io::save_grad_check_csv(res, tmp.path / "gc.csv");
  const std::string text = slurp(tmp.path / "gc.csv");
  CHECK(text.rfind("trial,side_b,dist_sq,dir,cut_dir,cut,objective\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(text.find("1,0.5,0,0,0,0,0\n") != std::string::npos);
}

TEST_CASE("termination states have stable names") {
  CHECK(std::string(io::termination_name(Termination::converged)) == "converged");
  CHECK(std::string(io::termination_name(Termination::stalled)) == "stalled");
  CHECK(std::string(io::termination_name(Termination::max_iters)) == "max_iters");
}

TEST_CASE("json files end with a newline and read back equal") {
  TempDir tmp;
  io::json j;
  j["alpha"] = 1;
  j["nested"] = {{"value", 2.5}};
  const fs::path p = tmp.path / "out.json";
  io::write_json(j, p);
  const std::string text = slurp(p);
  REQUIRE(!text.empty());
  CHECK(text.back() == '\n');
  CHECK(io::read_json(p) == j);
  CHECK_THROWS_AS(io::read_json(tmp.path / "missing.json"), InvalidInput);
}
