#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "railrecover/io.hpp"
#include "json_read.hpp"

namespace railrecover {

namespace {

using namespace jsonread;

TimeWindow parse_window(const Json& j, const std::string& path) {
  expect_object(j, path, {"start", "end"});
  return {as_seconds(require(j, "start", path), child(path, "start")),
          as_seconds(require(j, "end", path), child(path, "end"))};
}

Direction parse_direction(const Json& j, const std::string& path) {
  const std::string s = as_string(j, path);
  if (s == "up") return Direction::Up;
  if (s == "down") return Direction::Down;
  throw ValidationError(path, "direction must be \"up\" or \"down\"");
}

Topology parse_topology(const Json& j, const std::string& path) {
  expect_object(j, path, {"stations", "tracks", "min_runs", "switches", "depots"});
  Topology t;
  t.stations = string_list(require(j, "stations", path), child(path, "stations"));
  const bool has_tracks = j.contains("tracks");
  const bool has_runs = j.contains("min_runs");
  if (has_tracks == has_runs) throw ValidationError(path, "give exactly one of \"tracks\" or \"min_runs\"");
  if (has_runs) {
    const std::string p = child(path, "min_runs");
    const Json& runs = as_array(j["min_runs"], p);
    std::vector<Seconds> v;
    for (std::size_t i = 0; i < runs.size(); ++i) v.push_back(as_seconds(runs[i], child(p, i)));
    if (t.stations.size() < 2 || v.size() + 1 != t.stations.size()) {
      throw ValidationError(p, "need one minimal run per adjacent station pair");
    }
    t = Topology::make_line(t.stations, v);
  } else {
    const std::string p = child(path, "tracks");
    const Json& tracks = as_array(j["tracks"], p);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      const std::string tp = child(p, i);
      const Json& tj = tracks[i];
      expect_object(tj, tp, {"id", "from", "to", "direction", "min_run"});
      Track tr;
      tr.id = as_string(require(tj, "id", tp), child(tp, "id"));
      tr.from = as_string(require(tj, "from", tp), child(tp, "from"));
      tr.to = as_string(require(tj, "to", tp), child(tp, "to"));
      tr.direction = parse_direction(require(tj, "direction", tp), child(tp, "direction"));
      tr.min_run = as_seconds(require(tj, "min_run", tp), child(tp, "min_run"));
      t.tracks.push_back(std::move(tr));
    }
  }
  optional_field(j, "switches", path, [&](const Json& v, const std::string& p) { t.switches = string_list(v, p); });
  optional_field(j, "depots", path, [&](const Json& v, const std::string& p) {
    for (std::size_t i = 0; i < as_array(v, p).size(); ++i) {
      const std::string dp = child(p, i);
      const Json& dj = v[i];
      expect_object(dj, dp, {"id", "station", "replacement_capacity", "min_idle", "access_time"});
      Depot d;
      d.id = as_string(require(dj, "id", dp), child(dp, "id"));
      d.station = as_string(require(dj, "station", dp), child(dp, "station"));
      optional_field(dj, "replacement_capacity", dp, [&](const Json& x, const std::string& xp) {
        d.replacement_capacity = static_cast<int>(as_seconds(x, xp));
      });
      optional_field(dj, "min_idle", dp, [&](const Json& x, const std::string& xp) { d.min_idle = as_seconds(x, xp); });
      optional_field(dj, "access_time", dp, [&](const Json& x, const std::string& xp) { d.access_time = as_seconds(x, xp); });
      t.depots.push_back(std::move(d));
    }
  });
  t.validate();
  return t;
}

Timetable parse_timetable(const Json& j, const std::string& path) {
  expect_object(j, path, {"cycle_time", "horizon", "trips", "circulations"});
  Timetable tt;
  tt.cycle_time = as_seconds(require(j, "cycle_time", path), child(path, "cycle_time"));
  tt.horizon = parse_window(require(j, "horizon", path), child(path, "horizon"));
  const std::string tp = child(path, "trips");
  const Json& trips = as_array(require(j, "trips", path), tp);
  for (std::size_t i = 0; i < trips.size(); ++i) {
    const std::string p = child(tp, i);
    const Json& x = trips[i];
    expect_object(x, p, {"id", "train", "line", "from", "to", "track", "departure", "arrival"});
    Trip t;
    t.id = as_string(require(x, "id", p), child(p, "id"));
    t.train = as_string(require(x, "train", p), child(p, "train"));
    t.line = as_string(require(x, "line", p), child(p, "line"));
    t.from = as_string(require(x, "from", p), child(p, "from"));
    t.to = as_string(require(x, "to", p), child(p, "to"));
    t.track = as_string(require(x, "track", p), child(p, "track"));
    t.departure = as_seconds(require(x, "departure", p), child(p, "departure"));
    t.arrival = as_seconds(require(x, "arrival", p), child(p, "arrival"));
    tt.trips.push_back(std::move(t));
  }
  const std::string cp = child(path, "circulations");
  const Json& circs = as_array(require(j, "circulations", path), cp);
  for (std::size_t i = 0; i < circs.size(); ++i) {
    const std::string p = child(cp, i);
    expect_object(circs[i], p, {"vehicle", "trips"});
    Circulation c;
    c.vehicle = as_string(require(circs[i], "vehicle", p), child(p, "vehicle"));
    c.trips = string_list(require(circs[i], "trips", p), child(p, "trips"));
    tt.circulations.push_back(std::move(c));
  }
  return tt;
}

GeneratorParams parse_generator(const Json& j, const std::string& path) {
  expect_object(j, path, {"cycle_time", "horizon", "buffer_fraction", "dwell", "min_layover", "phase"});
  GeneratorParams g;
  g.cycle_time = as_seconds(require(j, "cycle_time", path), child(path, "cycle_time"));
  g.horizon = parse_window(require(j, "horizon", path), child(path, "horizon"));
  optional_field(j, "buffer_fraction", path, [&](const Json& v, const std::string& p) { g.buffer_fraction = as_number(v, p); });
  optional_field(j, "dwell", path, [&](const Json& v, const std::string& p) { g.dwell = as_seconds(v, p); });
  optional_field(j, "min_layover", path, [&](const Json& v, const std::string& p) { g.min_layover = as_seconds(v, p); });
  optional_field(j, "phase", path, [&](const Json& v, const std::string& p) { g.phase = as_seconds(v, p); });
  return g;
}

Disruption parse_disruption(const Json& j, const std::string& path) {
  Disruption d;
  if (j.is_null()) return d;
  expect_object(j, path, {"tracks", "start", "end"});
  optional_field(j, "tracks", path, [&](const Json& v, const std::string& p) { d.tracks = string_list(v, p); });
  optional_field(j, "start", path, [&](const Json& v, const std::string& p) { d.start = as_seconds(v, p); });
  optional_field(j, "end", path, [&](const Json& v, const std::string& p) { d.end = as_seconds(v, p); });
  return d;
}

std::map<std::string, Seconds> seconds_map(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, std::string("expected an object, found ") + type_name(j));
  std::map<std::string, Seconds> out;
  for (const auto& [k, v] : j.items()) out[k] = as_seconds(v, child(path, k));
  return out;
}

Policy parse_policy(const Json& j, const std::string& path) {
  expect_object(j, path,
                {"max_delay", "recovery", "safety_margin", "turn_stations", "min_turnaround", "min_dwell",
                 "drive_stretch", "max_drive_overrides", "weights", "penalties", "opposite_headway"});
  Policy p;
  auto secs = [&](const char* key, Seconds& out) {
    optional_field(j, key, path, [&](const Json& v, const std::string& vp) { out = as_seconds(v, vp); });
  };
  secs("max_delay", p.max_delay);
  secs("recovery", p.recovery);
  secs("safety_margin", p.safety_margin);
  secs("min_turnaround", p.min_turnaround);
  secs("min_dwell", p.min_dwell);
  optional_field(j, "turn_stations", path, [&](const Json& v, const std::string& vp) { p.turn_stations = string_list(v, vp); });
  optional_field(j, "drive_stretch", path, [&](const Json& v, const std::string& vp) {
    if (!v.is_null()) p.drive_stretch = as_seconds(v, vp);
  });
  optional_field(j, "max_drive_overrides", path,
                 [&](const Json& v, const std::string& vp) { p.max_drive_overrides = seconds_map(v, vp); });
  optional_field(j, "weights", path, [&](const Json& v, const std::string& vp) {
    expect_object(v, vp, {"default", "overrides"});
    optional_field(v, "default", vp, [&](const Json& x, const std::string& xp) { p.default_weight = as_number(x, xp); });
    optional_field(v, "overrides", vp, [&](const Json& x, const std::string& xp) {
      if (!x.is_object()) throw ValidationError(xp, "expected an object");
      for (const auto& [k, w] : x.items()) p.weight_overrides[k] = as_number(w, child(xp, k));
    });
  });
  optional_field(j, "penalties", path, [&](const Json& v, const std::string& vp) {
    expect_object(v, vp, {"turn", "return"});
    optional_field(v, "turn", vp, [&](const Json& x, const std::string& xp) { p.turn_penalty = as_number(x, xp); });
    optional_field(v, "return", vp, [&](const Json& x, const std::string& xp) { p.return_penalty = as_number(x, xp); });
  });
  optional_field(j, "opposite_headway", path, [&](const Json& v, const std::string& vp) {
    const std::string s = as_string(v, vp);
    if (s == "max") {
      p.opposite_headway = TransitBasis::Max;
    } else if (s == "min") {
      p.opposite_headway = TransitBasis::Min;
    } else {
      throw ValidationError(vp, "must be \"max\" or \"min\"");
    }
  });
  return p;
}

const char* to_json_name(NodeSelection s) {
  switch (s) {
    case NodeSelection::BestBound: return "best_bound";
    case NodeSelection::BestEstimate: return "best_estimate";
    case NodeSelection::DepthFirst: return "depth_first";
  }
  return "best_bound";
}

const char* to_json_name(BranchingRule r) {
  return r == BranchingRule::HeadwayFirst ? "headway_first" : "most_fractional";
}

SolverDefaults parse_solver(const Json& j, const std::string& path) {
  expect_object(j, path, {"time_limit", "node_limit", "gap", "node_selection", "branching", "seed", "extended_objective"});
  SolverDefaults s;
  optional_field(j, "time_limit", path, [&](const Json& v, const std::string& p) { s.time_limit = as_number(v, p); });
  optional_field(j, "node_limit", path, [&](const Json& v, const std::string& p) { s.node_limit = as_seconds(v, p); });
  optional_field(j, "gap", path, [&](const Json& v, const std::string& p) { s.gap = as_number(v, p); });
  optional_field(j, "seed", path, [&](const Json& v, const std::string& p) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ValidationError(p, "seed must be a non-negative integer");
    }
    s.seed = v.get<std::uint64_t>();
  });
  optional_field(j, "extended_objective", path, [&](const Json& v, const std::string& p) { s.extended_objective = as_bool(v, p); });
  optional_field(j, "node_selection", path, [&](const Json& v, const std::string& p) {
    const std::string n = as_string(v, p);
    if (n == "best_bound") {
      s.node_selection = NodeSelection::BestBound;
    } else if (n == "best_estimate") {
      s.node_selection = NodeSelection::BestEstimate;
    } else if (n == "depth_first") {
      s.node_selection = NodeSelection::DepthFirst;
    } else {
      throw ValidationError(p, "unknown node selection '" + n + "'");
    }
  });
  optional_field(j, "branching", path, [&](const Json& v, const std::string& p) {
    const std::string n = as_string(v, p);
    if (n == "headway_first") {
      s.branching = BranchingRule::HeadwayFirst;
    } else if (n == "most_fractional") {
      s.branching = BranchingRule::MostFractional;
    } else {
      throw ValidationError(p, "unknown branching rule '" + n + "'");
    }
  });
  return s;
}

void check_version(const Json& doc) {
  const Json& v = require(doc, "schema_version", "");
  const std::string s = as_string(v, "/schema_version");
  int major = 0;
  std::size_t pos = 0;
  try {
    major = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError("/schema_version", "malformed version '" + s + "'");
  }
  if (pos == 0 || (pos < s.size() && s[pos] != '.')) throw ValidationError("/schema_version", "malformed version '" + s + "'");
  if (major > kSchemaMajor) {
    throw ValidationError("/schema_version", "version " + s + " is newer than the supported " + kSchemaVersion);
  }
  if (major < 1) throw ValidationError("/schema_version", "unsupported version " + s);
}

Json window_json(const TimeWindow& w) { return Json{{"start", w.start}, {"end", w.end}}; }

}  // namespace

Scenario parse_scenario(const Json& doc) {
  expect_object(doc, "", {"schema_version", "name", "topology", "timetable", "generator", "disruption", "policy", "solver"});
  check_version(doc);
  Scenario s;
  optional_field(doc, "name", "", [&](const Json& v, const std::string& p) { s.name = as_string(v, p); });
  s.topology = parse_topology(require(doc, "topology", ""), "/topology");
  const bool has_tt = doc.contains("timetable");
  const bool has_gen = doc.contains("generator");
  if (has_tt == has_gen) throw ValidationError("", "give exactly one of \"timetable\" or \"generator\"");
  if (has_gen) {
    s.generator = parse_generator(doc["generator"], "/generator");
    s.timetable = generate_cyclic_timetable(s.topology, *s.generator);
  } else {
    s.timetable = parse_timetable(doc["timetable"], "/timetable");
  }
  optional_field(doc, "disruption", "", [&](const Json& v, const std::string& p) { s.disruption = parse_disruption(v, p); });
  optional_field(doc, "policy", "", [&](const Json& v, const std::string& p) { s.policy = parse_policy(v, p); });
  optional_field(doc, "solver", "", [&](const Json& v, const std::string& p) { s.solver = parse_solver(v, p); });
  s.validate();
  return s;
}

Scenario parse_scenario_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

Json scenario_to_json(const Scenario& s) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = s.name;
  Json topo;
  topo["stations"] = s.topology.stations;
  Json tracks = Json::array();
  for (const auto& t : s.topology.tracks) {
    tracks.push_back(Json{{"id", t.id}, {"from", t.from}, {"to", t.to}, {"direction", to_string(t.direction)}, {"min_run", t.min_run}});
  }
  topo["tracks"] = std::move(tracks);
  topo["switches"] = s.topology.switches;
  Json depots = Json::array();
  for (const auto& d : s.topology.depots) {
    depots.push_back(Json{{"id", d.id},
                          {"station", d.station},
                          {"replacement_capacity", d.replacement_capacity},
                          {"min_idle", d.min_idle},
                          {"access_time", d.access_time}});
  }
  topo["depots"] = std::move(depots);
  doc["topology"] = std::move(topo);
  if (s.generator) {
    const auto& g = *s.generator;
    doc["generator"] = Json{{"cycle_time", g.cycle_time},
                            {"horizon", window_json(g.horizon)},
                            {"buffer_fraction", g.buffer_fraction},
                            {"dwell", g.dwell},
                            {"min_layover", g.min_layover},
                            {"phase", g.phase}};
  } else {
    Json tt;
    tt["cycle_time"] = s.timetable.cycle_time;
    tt["horizon"] = window_json(s.timetable.horizon);
    Json trips = Json::array();
    for (const auto& t : s.timetable.trips) {
      trips.push_back(Json{{"id", t.id},
                           {"train", t.train},
                           {"line", t.line},
                           {"from", t.from},
                           {"to", t.to},
                           {"track", t.track},
                           {"departure", t.departure},
                           {"arrival", t.arrival}});
    }
    tt["trips"] = std::move(trips);
    Json circs = Json::array();
    for (const auto& c : s.timetable.circulations) circs.push_back(Json{{"vehicle", c.vehicle}, {"trips", c.trips}});
    tt["circulations"] = std::move(circs);
    doc["timetable"] = std::move(tt);
  }
  doc["disruption"] = Json{{"tracks", s.disruption.tracks}, {"start", s.disruption.start}, {"end", s.disruption.end}};
  const Policy& p = s.policy;
  Json policy;
  policy["max_delay"] = p.max_delay;
  policy["recovery"] = p.recovery;
  policy["safety_margin"] = p.safety_margin;
  policy["turn_stations"] = p.turn_stations;
  policy["min_turnaround"] = p.min_turnaround;
  policy["min_dwell"] = p.min_dwell;
  policy["drive_stretch"] = p.drive_stretch ? Json(*p.drive_stretch) : Json(nullptr);
  policy["max_drive_overrides"] = Json::object();
  for (const auto& [k, v] : p.max_drive_overrides) policy["max_drive_overrides"][k] = v;
  Json overrides = Json::object();
  for (const auto& [k, v] : p.weight_overrides) overrides[k] = v;
  policy["weights"] = Json{{"default", p.default_weight}, {"overrides", std::move(overrides)}};
  policy["penalties"] = Json{{"turn", p.turn_penalty}, {"return", p.return_penalty}};
  policy["opposite_headway"] = p.opposite_headway == TransitBasis::Max ? "max" : "min";
  doc["policy"] = std::move(policy);
  doc["solver"] = solver_to_json(s.solver);
  return doc;
}

std::string write_scenario(const Scenario& scenario) { return scenario_to_json(scenario).dump(2) + "\n"; }

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

Scenario load_scenario(const std::string& path) { return parse_scenario_text(load_text(path)); }

std::string scenario_hash(const Scenario& scenario) {
  const std::string text = scenario_to_json(scenario).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

SolverDefaults parse_solver_defaults(const Json& j, const std::string& path) { return parse_solver(j, path); }

Json solver_to_json(const SolverDefaults& d) {
  return Json{{"time_limit", d.time_limit},
              {"node_limit", d.node_limit},
              {"gap", d.gap},
              {"node_selection", to_json_name(d.node_selection)},
              {"branching", to_json_name(d.branching)},
              {"seed", d.seed},
              {"extended_objective", d.extended_objective}};
}

}  // namespace railrecover
