#include <cmath>

#include "railrecover/io.hpp"
#include "railrecover/milp.hpp"

#include "json_read.hpp"

namespace railrecover {

SolveSummary SolveSummary::from(const SolveResult& r, const MilpModel& model) {
  SolveSummary s;
  s.status = to_string(r.status);
  s.primal = r.primal;
  s.dual_bound = r.dual_bound;
  s.gap = r.gap;
  s.nodes = r.nodes;
  s.wall_time = r.wall_time;
  s.binaries = model.binary_count();
  s.integers = model.integer_count();
  return s;
}

Json report_to_json(const ValidationReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    violations.push_back(Json{{"check", v.check}, {"entities", v.entities}, {"slack", v.slack}, {"message", v.message}});
  }
  return Json{{"pass", r.pass},
              {"objective", r.objective},
              {"served", r.served},
              {"cancelled", r.cancelled},
              {"turns", r.turns},
              {"returns", r.returns},
              {"replacements", r.replacements},
              {"violations", std::move(violations)}};
}

ValidationReport report_from_json(const Json& j) {
  ValidationReport r;
  r.pass = j.at("pass").get<bool>();
  r.objective = j.at("objective").get<double>();
  r.served = j.at("served").get<std::size_t>();
  r.cancelled = j.at("cancelled").get<std::size_t>();
  r.turns = j.at("turns").get<std::size_t>();
  r.returns = j.at("returns").get<std::size_t>();
  r.replacements = j.at("replacements").get<std::size_t>();
  for (const auto& v : j.at("violations")) {
    r.violations.push_back(Violation{v.at("check").get<std::string>(), v.at("entities").get<std::vector<std::int32_t>>(),
                                     v.at("slack").get<double>(), v.at("message").get<std::string>()});
  }
  return r;
}

namespace {

Json solve_json(const SolveSummary& s) {
  return Json{{"status", s.status},     {"primal", s.primal}, {"dual_bound", s.dual_bound}, {"gap", s.gap},
              {"nodes", s.nodes},       {"wall_time", s.wall_time}, {"binaries", s.binaries},
              {"integers", s.integers}};
}

}  // namespace

Json solution_to_json(const SolutionDocument& doc, const Network& network) {
  const Solution& sol = doc.solution;
  if (sol.active.size() != network.activities.size() || sol.delay.size() != network.events.size()) {
    throw Error("solution does not match the network");
  }
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario_hash"] = doc.scenario_hash;
  j["scenario"] = doc.scenario_name;
  j["events"] = network.events.size();
  j["activities"] = network.activities.size();
  Json active = Json::array();
  for (std::size_t a = 0; a < sol.active.size(); ++a) {
    if (sol.active[a] != 0) active.push_back(a);
  }
  j["active"] = std::move(active);
  Json delays = Json::object();
  for (std::size_t v = 0; v < sol.delay.size(); ++v) {
    if (sol.delay[v] != 0) delays[std::to_string(v)] = sol.delay[v];
  }
  j["delays"] = std::move(delays);
  j["report"] = report_to_json(doc.report);
  if (doc.solve) j["solve"] = solve_json(*doc.solve);

  const SolutionDetails details = describe(network, sol);
  Json paths = Json::array();
  for (const auto& p : details.paths) {
    Json stops = Json::array();
    for (EventId e : p.events) {
      const Event& ev = network.event(e);
      stops.push_back(Json{{"event", e.value},
                           {"kind", to_string(ev.kind)},
                           {"station", ev.kind == EventKind::DepotArrival ? ev.depot : ev.station},
                           {"time", sol.time_of(network, e)},
                           {"delay", sol.delay_of(e)}});
    }
    paths.push_back(Json{{"vehicle", p.vehicle}, {"modified", p.modified}, {"trips", p.trips}, {"stops", std::move(stops)}});
  }
  j["paths"] = std::move(paths);
  j["cancelled_trips"] = details.cancelled;
  return j;
}

std::string write_solution(const SolutionDocument& doc, const Network& network) {
  return solution_to_json(doc, network).dump(2) + "\n";
}

SolutionDocument read_solution(const Json& j, const std::string& expected_hash, std::vector<std::string>* warnings) {
  SolutionDocument doc;
  jsonread::expect_object(j, "", {"schema_version", "scenario_hash", "scenario", "events", "activities", "active", "delays",
                                  "report", "solve", "paths", "cancelled_trips"});
  try {
    const std::string version = j.at("schema_version").get<std::string>();
    if (std::stoi(version) > kSchemaMajor) throw ValidationError("/schema_version", "version " + version + " is too new");
    doc.scenario_hash = j.at("scenario_hash").get<std::string>();
    doc.scenario_name = j.value("scenario", std::string());
    const auto n_events = j.at("events").get<std::size_t>();
    const auto n_acts = j.at("activities").get<std::size_t>();
    doc.solution.active.assign(n_acts, 0);
    doc.solution.delay.assign(n_events, 0);
    for (const auto& a : j.at("active")) {
      const auto idx = a.get<std::size_t>();
      if (idx >= n_acts) throw ValidationError("/active", "activity " + std::to_string(idx) + " out of range");
      doc.solution.active[idx] = 1;
    }
    for (const auto& [key, value] : j.at("delays").items()) {
      const auto idx = static_cast<std::size_t>(std::stoul(key));
      if (idx >= n_events) throw ValidationError("/delays/" + key, "event out of range");
      doc.solution.delay[idx] = value.get<Seconds>();
    }
    doc.report = report_from_json(j.at("report"));
    if (j.contains("solve")) {
      const Json& s = j["solve"];
      SolveSummary sum;
      sum.status = s.at("status").get<std::string>();
      sum.primal = s.at("primal").get<double>();
      sum.dual_bound = s.at("dual_bound").get<double>();
      sum.gap = s.at("gap").get<double>();
      sum.nodes = s.at("nodes").get<std::int64_t>();
      sum.wall_time = s.at("wall_time").get<double>();
      sum.binaries = s.at("binaries").get<std::size_t>();
      sum.integers = s.at("integers").get<std::size_t>();
      doc.solve = sum;
    }
  } catch (const Json::exception& e) {
    throw ValidationError("", std::string("malformed solution document: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ValidationError("", std::string("malformed solution document: ") + e.what());
  }
  if (!expected_hash.empty() && expected_hash != doc.scenario_hash && warnings != nullptr) {
    warnings->push_back("scenario hash " + doc.scenario_hash + " differs from " + expected_hash);
  }
  return doc;
}

SolutionDocument read_solution_text(std::string_view text, const std::string& expected_hash, std::vector<std::string>* warnings) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("", std::string("malformed JSON: ") + e.what());
  }
  return read_solution(j, expected_hash, warnings);
}

Json solution_summary(const SolutionDocument& doc, const Network& network) {
  const SolutionDetails details = describe(network, doc.solution);
  Json j;
  j["scenario"] = doc.scenario_name;
  j["scenario_hash"] = doc.scenario_hash;
  j["objective"] = doc.report.objective;
  j["pass"] = doc.report.pass;
  j["trips"] = network.trip_count();
  j["served"] = doc.report.served;
  j["cancelled"] = doc.report.cancelled;
  j["turns"] = doc.report.turns;
  j["returns"] = doc.report.returns;
  j["replacements"] = doc.report.replacements;
  Json per_depot = Json::object();
  for (const auto& [depot, n] : details.replacements) per_depot[depot] = n;
  j["replacements_by_depot"] = std::move(per_depot);
  std::size_t modified = 0;
  for (const auto& p : details.paths) modified += p.modified ? 1 : 0;
  j["modified_paths"] = modified;
  if (doc.solve) j["solve"] = solve_json(*doc.solve);
  return j;
}

}  // namespace railrecover
