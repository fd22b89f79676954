#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "railrecover/network.hpp"
#include "railrecover/scenario.hpp"
#include "railrecover/solution.hpp"
#include "railrecover/solve.hpp"
#include "railrecover/verify.hpp"

namespace railrecover {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr int kSchemaMajor = 1;

// Scenario files. Parsing validates the result; every failure is a
// ValidationError whose path points into the document.
[[nodiscard]] Scenario parse_scenario(const Json& document);
[[nodiscard]] Scenario parse_scenario_text(std::string_view text);
[[nodiscard]] Json scenario_to_json(const Scenario& scenario);
[[nodiscard]] std::string write_scenario(const Scenario& scenario);
[[nodiscard]] Scenario load_scenario(const std::string& path);
void save_text(const std::string& path, const std::string& text);
[[nodiscard]] std::string load_text(const std::string& path);

// The "solver" section on its own; the service accepts it as solve
// parameters.
[[nodiscard]] SolverDefaults parse_solver_defaults(const Json& j, const std::string& path = "");
[[nodiscard]] Json solver_to_json(const SolverDefaults& defaults);

// FNV-1a 64 of the canonical scenario document, as 16 hex digits.
[[nodiscard]] std::string scenario_hash(const Scenario& scenario);

// Outcome of the solver run that produced a solution.
struct SolveSummary {
  std::string status;
  double primal = 0.0;
  double dual_bound = 0.0;
  double gap = 0.0;
  std::int64_t nodes = 0;
  double wall_time = 0.0;
  std::size_t binaries = 0;
  std::size_t integers = 0;

  static SolveSummary from(const SolveResult& result, const MilpModel& model);
  friend bool operator==(const SolveSummary&, const SolveSummary&) = default;
};

struct SolutionDocument {
  std::string scenario_hash;
  std::string scenario_name;
  Solution solution;
  ValidationReport report;
  std::optional<SolveSummary> solve;

  friend bool operator==(const SolutionDocument&, const SolutionDocument&) = default;
};

// The written document also lists the served vehicle paths and cancelled
// trips for readers; they are derived data and ignored on reading.
[[nodiscard]] Json solution_to_json(const SolutionDocument& doc, const Network& network);
[[nodiscard]] std::string write_solution(const SolutionDocument& doc, const Network& network);
// A hash different from `expected_hash` (when given) adds a warning.
[[nodiscard]] SolutionDocument read_solution(const Json& document, const std::string& expected_hash = {},
                                             std::vector<std::string>* warnings = nullptr);
[[nodiscard]] SolutionDocument read_solution_text(std::string_view text, const std::string& expected_hash = {},
                                                  std::vector<std::string>* warnings = nullptr);

[[nodiscard]] Json report_to_json(const ValidationReport& report);
[[nodiscard]] ValidationReport report_from_json(const Json& j);

// Counts for the dispatcher: served, cancelled, turns, returns,
// replacements, objective and solver status.
[[nodiscard]] Json solution_summary(const SolutionDocument& doc, const Network& network);

// Time-space diagram as SVG. Stations are placed by cumulative minimal
// driving time; each vehicle path is one polyline, modified paths dashed.
[[nodiscard]] std::string render_time_space_diagram(const Scenario& scenario, const Network& network,
                                                    const Solution& solution);

struct RunSummaryRow {
  Seconds duration = 0;  // blocked interval, seconds
  std::size_t binaries = 0;
  std::size_t integers = 0;
  std::size_t trips = 0;
  std::optional<double> value;
  std::optional<double> upper_bound;
  double time = 0.0;
  std::string status;  // "opt", a gap like "4.2%", "limit", "infeasible" or "error"
  std::optional<double> value_60s;
  double reduction = 0.0;  // unreduced / reduced binaries
  std::string error;

  friend bool operator==(const RunSummaryRow&, const RunSummaryRow&) = default;
};

struct BenchmarkParams {
  double time_limit = 1800.0;
  bool budget_60s = true;
  double budget = 60.0;
  std::uint64_t seed = 0;
  bool extended = false;
};

// Copy of `scenario` whose blocked interval lasts `duration` seconds.
[[nodiscard]] Scenario with_duration(Scenario scenario, Seconds duration);

// One row per scenario: build, reduce, formulate, solve with the full
// budget and with the short budget (best-estimate search).
[[nodiscard]] std::vector<RunSummaryRow> run_benchmark(const std::vector<Scenario>& scenarios,
                                                       const BenchmarkParams& params);
[[nodiscard]] std::string format_table(const std::vector<RunSummaryRow>& rows);
[[nodiscard]] std::string format_csv(const std::vector<RunSummaryRow>& rows);

}  // namespace railrecover
