#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ablate/calibration.hpp"
#include "ablate/field.hpp"
#include "ablate/gradcheck.hpp"
#include "ablate/planner.hpp"
#include "ablate/sim.hpp"

namespace ablate::io {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal representation; used for every double written to
// CSV so reruns are byte-identical.
std::string format_double(double v);

// ---- Point sets: CSV with header "x,y,z", mm ----
void save_pointset_csv(const PointSet& set, const std::filesystem::path& path);
PointSet load_pointset_csv(const std::filesystem::path& path);

// ---- Scalar/vector fields: JSON header + CSV values in x-fastest order ----
void save_scalar_field(const ScalarField3& field, const std::filesystem::path& json_path,
                       const std::filesystem::path& csv_path);
ScalarField3 load_scalar_field(const std::filesystem::path& json_path);
void save_vector_field(const VectorField3& field, const std::filesystem::path& json_path,
                       const std::filesystem::path& csv_path);
VectorField3 load_vector_field(const std::filesystem::path& json_path);

// ---- Fit result ----
json fit_to_json(const FitResult& fit);

// ---- Derivative check: one CSV row of relative errors per configuration ----
void save_grad_check_csv(const GradCheckResult& res,
                         const std::filesystem::path& path);

// ---- Plan result: JSON summary (degrees at the boundary) + cost trace CSV ----
json plan_to_json(const PlanResult& res);
void save_cost_trace_csv(const std::vector<double>& trace,
                         const std::filesystem::path& path);

const char* termination_name(Termination t);

// ---- Simulation reports ----
json report_to_json(const Test1Report& rep);
json report_to_json(const Test2Report& rep);
json report_to_json(const Test3Report& rep);

// records.csv writers (one row per run or per robot).
void save_records_csv(const Test1Report& rep, const std::filesystem::path& path);
void save_records_csv(const Test2Report& rep, const std::filesystem::path& path);
void save_records_csv(const Test3Report& rep, const std::filesystem::path& path);

// Per-run trace and contour files inside `dir` (trace_<run>.csv, and for
// Test 3 contour_before/after_<run>.csv).
void save_traces(const Test1Report& rep, const std::filesystem::path& dir);
void save_traces(const Test2Report& rep, const std::filesystem::path& dir);
void save_traces(const Test3Report& rep, const std::filesystem::path& dir);

// Writes pretty-printed JSON with a trailing newline.
void write_json(const json& j, const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace ablate::io
