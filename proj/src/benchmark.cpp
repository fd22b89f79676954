#include <cstdio>
#include <sstream>

#include "railrecover/io.hpp"
#include "railrecover/pipeline.hpp"

namespace railrecover {

Scenario with_duration(Scenario scenario, Seconds duration) {
  scenario.disruption.end = scenario.disruption.start + duration;
  if (scenario.generator) {
    // Keep the horizon long enough for the recovery window.
    auto& g = *scenario.generator;
    g.horizon.end = std::max(g.horizon.end, scenario.recovery_end() + 300);
    scenario.timetable = generate_cyclic_timetable(scenario.topology, g);
  }
  return scenario;
}

namespace {

// Verified objective of a solver result on the full network.
std::optional<double> verified_value(const Scenario& s, const Network& network, const ReducedNetwork& reduced,
                                     const SolveResult& r, bool extended) {
  if (!r.solution) return std::nullopt;
  const Solution full = expand_solution(*r.solution, reduced.map, network);
  VerifyOptions vo;
  vo.extended = extended;
  const ValidationReport report = validate_solution(network, s, full, vo);
  if (!report.pass) throw Error("solver result failed verification (" + report.violations.front().check + ")");
  return report.objective;
}

std::string gap_text(double gap) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * gap);
  return buf;
}

std::string num(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

}  // namespace

std::vector<RunSummaryRow> run_benchmark(const std::vector<Scenario>& scenarios, const BenchmarkParams& params) {
  std::vector<RunSummaryRow> rows;
  for (const Scenario& s : scenarios) {
    RunSummaryRow row;
    row.duration = s.disruption.end - s.disruption.start;
    try {
      const Network network = build_network(s);
      const ReducedNetwork reduced = reduce(network);
      FormulateOptions fo;
      fo.extended = params.extended;
      fo.fixed = &reduced.fixed;
      fo.name = s.name;
      const MilpModel model = formulate(reduced.network, fo);
      row.binaries = model.binary_count();
      row.integers = model.integer_count();
      row.trips = network.trip_count();
      const std::size_t full = unreduced_binaries(network);
      row.reduction = row.binaries == 0 ? 0.0 : static_cast<double>(full) / static_cast<double>(row.binaries);

      SolveParams sp = SolveParams::from(s.solver);
      sp.time_limit = params.time_limit;
      sp.seed = params.seed;
      const SolveResult r = solve(model, sp);
      row.value = verified_value(s, network, reduced, r, params.extended);
      row.upper_bound = r.dual_bound;
      row.time = r.wall_time;
      switch (r.status) {
        case SolveStatus::Optimal: row.status = "opt"; break;
        case SolveStatus::Feasible: row.status = gap_text(r.gap); break;
        case SolveStatus::Infeasible: row.status = "infeasible"; break;
        case SolveStatus::Limit: row.status = "limit"; break;
      }
      if (params.budget_60s) {
        SolveParams quick = sp;
        quick.time_limit = params.budget;
        quick.node_selection = NodeSelection::BestEstimate;
        row.value_60s = verified_value(s, network, reduced, solve(model, quick), params.extended);
      }
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_table(const std::vector<RunSummaryRow>& rows) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%5s %7s %6s %6s %9s %9s %9s %8s %9s %6s\n", "dur", "bin", "int", "trips", "value",
                "bound", "time", "status", "60s", "red");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%5lld %7zu %6zu %6zu %9s %9s %9.2f %8s %9s %6.2f\n",
                  static_cast<long long>(r.duration / 60), r.binaries, r.integers, r.trips, num(r.value).c_str(),
                  num(r.upper_bound).c_str(), r.time, r.status.c_str(), num(r.value_60s).c_str(), r.reduction);
    out << buf;
    if (!r.error.empty()) out << "      error: " << r.error << "\n";
  }
  return out.str();
}

std::string format_csv(const std::vector<RunSummaryRow>& rows) {
  std::ostringstream out;
  out << "dur,bin,int,trips,value,bound,time,status,value_60s,reduction,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    for (char& c : err) {
      if (c == '"') c = '\'';
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", r.time);
    out << r.duration / 60 << ',' << r.binaries << ',' << r.integers << ',' << r.trips << ','
        << (r.value ? num(r.value) : "") << ',' << (r.upper_bound ? num(r.upper_bound) : "") << ',' << buf << ','
        << r.status << ',' << (r.value_60s ? num(r.value_60s) : "") << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.reduction);
    out << buf << ",\"" << err << "\"\n";
  }
  return out.str();
}

}  // namespace railrecover
