// Command line front end: thin wrappers over the library.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "railrecover/io.hpp"
#include "railrecover/pipeline.hpp"
#include "railrecover/service.hpp"

using namespace railrecover;

namespace {

struct Common {
  std::string scenario;
  std::string out;
  std::optional<double> time_limit;
  std::optional<double> gap;
  std::optional<std::uint64_t> seed;
  bool budget_60s = false;
  bool extended = false;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    save_text(out, text);
  }
}

Scenario scenario_with_flags(const Common& c) {
  Scenario s = load_scenario(c.scenario);
  if (c.time_limit) s.solver.time_limit = *c.time_limit;
  if (c.gap) s.solver.gap = *c.gap;
  if (c.seed) s.solver.seed = *c.seed;
  if (c.budget_60s) {
    s.solver.time_limit = 60.0;
    s.solver.node_selection = NodeSelection::BestEstimate;
  }
  if (c.extended) s.solver.extended_objective = true;
  return s;
}

Json network_stats(const Network& n) {
  Json events = Json::object();
  for (EventKind k : {EventKind::Departure, EventKind::Arrival, EventKind::DepotArrival, EventKind::ReplacementSource,
                      EventKind::Origin, EventKind::Sink}) {
    events[to_string(k)] = n.count(k);
  }
  Json acts = Json::object();
  for (ActivityKind k : {ActivityKind::Drive, ActivityKind::Wait, ActivityKind::Turn, ActivityKind::Return,
                         ActivityKind::DepotReinsert, ActivityKind::Replacement, ActivityKind::Start,
                         ActivityKind::Finish, ActivityKind::TrackHeadway, ActivityKind::StationHeadway}) {
    acts[to_string(k)] = n.count(k);
  }
  return Json{{"events", n.events.size()},
              {"activities", n.activities.size()},
              {"trips", n.trip_count()},
              {"event_kinds", events},
              {"activity_kinds", acts},
              {"station_conflicts", n.station_conflicts.size()}};
}

void add_common(CLI::App* app, Common& c, bool solver_flags) {
  app->add_option("--scenario", c.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "Output file (default: stdout)");
  if (solver_flags) {
    app->add_option("--time-limit", c.time_limit, "Solver time limit in seconds (0 = none)");
    app->add_option("--gap", c.gap, "Relative gap at which to stop");
    app->add_option("--seed", c.seed, "Random seed");
    app->add_flag("--budget-60s", c.budget_60s, "60 s budget with best-estimate search");
    app->add_flag("--extended-objective", c.extended, "Add turn and return penalties to the objective");
  }
}

int cmd_build(const Common& c) {
  const Scenario s = load_scenario(c.scenario);
  const Network n = build_network(s);
  Json j = network_stats(n);
  j["margin_violations"] = validate_safety_margins(n).size();
  emit(j.dump(2), c.out);
  return 0;
}

int cmd_reduce(const Common& c) {
  const Scenario s = load_scenario(c.scenario);
  const Network n = build_network(s);
  const ReducedNetwork r = reduce(n);
  FormulateOptions fo;
  fo.fixed = &r.fixed;
  const MilpModel m = formulate(r.network, fo);
  const std::size_t before = unreduced_binaries(n);
  Json reasons = Json::object();
  for (FixReason why : {FixReason::SameDirection, FixReason::Window, FixReason::Exclusive}) {
    std::size_t k = 0;
    for (const auto& [a, v] : r.fixed.values) k += v.reason == why ? 1 : 0;
    reasons[to_string(why)] = k;
  }
  Json j{{"original", network_stats(n)},
         {"reduced", network_stats(r.network)},
         {"chains", r.map.chains.size()},
         {"fixed", r.fixed.size()},
         {"fixed_by_reason", reasons},
         {"binaries_before", before},
         {"binaries_after", m.binary_count()},
         {"integers_after", m.integer_count()},
         {"ratio", m.binary_count() == 0 ? 0.0 : double(before) / double(m.binary_count())}};
  emit(j.dump(2), c.out);
  return 0;
}

int cmd_solve(const Common& c, bool no_reduce, bool quiet) {
  const Scenario s = scenario_with_flags(c);
  PipelineOptions o = pipeline_options(s);
  o.reduce = !no_reduce;
  if (!quiet) {
    o.control.on_progress = [](const Progress& p) {
      std::fprintf(stderr, "%8.2fs nodes %8lld  primal %s  bound %.3f  gap %.2f%%\n", p.elapsed,
                   static_cast<long long>(p.nodes), p.primal ? std::to_string(*p.primal).c_str() : "-",
                   p.dual_bound, 100.0 * p.gap);
    };
    o.control.progress_interval = 1.0;
  }
  const PipelineResult r = run_pipeline(s, o);
  std::fprintf(stderr, "status %s, %lld nodes, %.2fs\n", to_string(r.result.status),
               static_cast<long long>(r.result.nodes), r.result.wall_time);
  if (!r.solution) {
    std::fprintf(stderr, "no solution found\n");
    return 2;
  }
  if (!r.report.pass) {
    std::fprintf(stderr, "solution failed verification (%zu violations)\n", r.report.violations.size());
    return 1;
  }
  SolutionDocument doc{scenario_hash(s), s.name, *r.solution, r.report, SolveSummary::from(r.result, r.model)};
  emit(write_solution(doc, r.network), c.out);
  return 0;
}

SolutionDocument load_solution(const std::string& path, const Scenario& s) {
  std::vector<std::string> warnings;
  SolutionDocument doc = read_solution_text(load_text(path), scenario_hash(s), &warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return doc;
}

int cmd_verify(const Common& c, const std::string& solution_path) {
  const Scenario s = scenario_with_flags(c);
  const Network n = build_network(s);
  const SolutionDocument doc = load_solution(solution_path, s);
  VerifyOptions vo;
  vo.extended = s.solver.extended_objective;
  const ValidationReport rep = validate_solution(n, s, doc.solution, vo);
  emit(report_to_json(rep).dump(2), c.out);
  std::fprintf(stderr, "%s\n", rep.pass ? "pass" : "FAIL");
  return rep.pass ? 0 : 1;
}

int cmd_diagram(const Common& c, const std::string& solution_path) {
  const Scenario s = load_scenario(c.scenario);
  const Network n = build_network(s);
  Solution sol;
  if (solution_path.empty()) {
    PipelineOptions o = pipeline_options(s);
    const PipelineResult r = run_pipeline(s, o);
    if (!r.solution || !r.report.pass) {
      std::fprintf(stderr, "no verified solution to draw\n");
      return 1;
    }
    sol = *r.solution;
  } else {
    sol = load_solution(solution_path, s).solution;
  }
  emit(render_time_space_diagram(s, n, sol), c.out);
  return 0;
}

int cmd_export_lp(const Common& c, bool no_reduce) {
  const Scenario s = scenario_with_flags(c);
  const Network n = build_network(s);
  FormulateOptions fo;
  fo.extended = s.solver.extended_objective;
  fo.name = s.name;
  if (no_reduce) {
    emit(export_model(formulate(n, fo)), c.out);
  } else {
    const ReducedNetwork r = reduce(n);
    fo.fixed = &r.fixed;
    emit(export_model(formulate(r.network, fo)), c.out);
  }
  return 0;
}

std::vector<Seconds> parse_durations(const std::string& list) {
  std::vector<Seconds> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(static_cast<Seconds>(std::stod(item) * 60.0));
  }
  return out;
}

int cmd_bench(const Common& c, const std::vector<std::string>& more, const std::string& durations,
              const std::string& csv) {
  std::vector<std::string> files{c.scenario};
  files.insert(files.end(), more.begin(), more.end());
  std::vector<Scenario> scenarios;
  const auto durs = parse_durations(durations);
  for (const auto& f : files) {
    Common one = c;
    one.scenario = f;
    const Scenario s = scenario_with_flags(one);
    if (durs.empty()) {
      scenarios.push_back(s);
    } else {
      for (Seconds d : durs) scenarios.push_back(with_duration(s, d));
    }
  }
  BenchmarkParams bp;
  bp.time_limit = c.time_limit.value_or(bp.time_limit);
  bp.budget_60s = true;
  if (c.budget_60s) bp.time_limit = 60.0;
  bp.seed = c.seed.value_or(0);
  bp.extended = c.extended;
  const auto rows = run_benchmark(scenarios, bp);
  emit(format_table(rows), c.out);
  if (!csv.empty()) save_text(csv, format_csv(rows));
  for (const auto& r : rows) {
    if (r.status == "error") return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rail disruption recovery: build, reduce, solve and verify rescheduling models"};
  app.require_subcommand(1);
  Common c;
  bool no_reduce = false;
  bool quiet = false;
  std::string solution_path;
  std::vector<std::string> more;
  std::string durations;
  std::string csv;

  auto* build = app.add_subcommand("build", "Build the event-activity network and print its size");
  add_common(build, c, false);
  auto* red = app.add_subcommand("reduce", "Fix precedences, contract chains and report the reduction");
  add_common(red, c, false);
  auto* sol = app.add_subcommand("solve", "Solve and write a verified solution document");
  add_common(sol, c, true);
  sol->add_flag("--no-reduce", no_reduce, "Solve the unreduced model");
  sol->add_flag("--quiet", quiet, "No progress output");
  auto* ver = app.add_subcommand("verify", "Check a solution document against a scenario");
  add_common(ver, c, true);
  ver->add_option("--solution", solution_path, "Solution document")->required()->check(CLI::ExistingFile);
  auto* dia = app.add_subcommand("diagram", "Render the time-space diagram as SVG");
  add_common(dia, c, false);
  dia->add_option("--solution", solution_path, "Solution document (default: solve first)")->check(CLI::ExistingFile);
  auto* lp = app.add_subcommand("export-lp", "Write the integer program in LP format");
  add_common(lp, c, true);
  lp->add_flag("--no-reduce", no_reduce, "Export the unreduced model");
  auto* bench = app.add_subcommand("bench", "Run the benchmark table over scenarios and blockage durations");
  add_common(bench, c, true);
  bench->add_option("more", more, "Further scenario files")->check(CLI::ExistingFile);
  bench->add_option("--durations", durations, "Comma separated blockage durations in minutes");
  bench->add_option("--csv", csv, "Also write the table as CSV");

  auto* serve = app.add_subcommand("serve", "Run the what-if HTTP service");
  ServiceConfig sc = ServiceConfig::from_env();
  std::string listen;
  serve->add_option("--listen", listen, "host:port (env RAILRECOVER_LISTEN)");
  serve->add_option("--store", sc.store, "Store directory (env RAILRECOVER_STORE)");
  serve->add_option("--workers", sc.workers, "Concurrent solver jobs (env RAILRECOVER_WORKERS)");
  serve->add_option("--time-limit", sc.default_time_limit, "Default time limit (env RAILRECOVER_TIME_LIMIT)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) return cmd_build(c);
    if (*red) return cmd_reduce(c);
    if (*sol) return cmd_solve(c, no_reduce, quiet);
    if (*ver) return cmd_verify(c, solution_path);
    if (*dia) return cmd_diagram(c, solution_path);
    if (*lp) return cmd_export_lp(c, no_reduce);
    if (*bench) return cmd_bench(c, more, durations, csv);
    if (*serve) {
      if (!listen.empty()) {
        const auto colon = listen.rfind(':');
        if (colon == std::string::npos) {
          sc.host = listen;
        } else {
          if (colon > 0) sc.host = listen.substr(0, colon);
          sc.port = std::stoi(listen.substr(colon + 1));
        }
      }
      Service service(sc);
      std::fprintf(stderr, "listening on %s:%d, store %s\n", sc.host.c_str(), sc.port, sc.store.c_str());
      service.listen();
      return 0;
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
