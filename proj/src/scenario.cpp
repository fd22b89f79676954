#include "railrecover/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace railrecover {

Direction opposite(Direction d) { return d == Direction::Up ? Direction::Down : Direction::Up; }

const char* to_string(Direction d) { return d == Direction::Up ? "up" : "down"; }

Topology Topology::make_line(std::vector<std::string> station_ids, const std::vector<Seconds>& min_runs) {
  if (station_ids.size() < 2 || min_runs.size() + 1 != station_ids.size()) {
    throw ValidationError("/topology", "a line needs n stations and n-1 segment run times");
  }
  Topology t;
  t.stations = std::move(station_ids);
  for (std::size_t i = 0; i + 1 < t.stations.size(); ++i) {
    const auto& a = t.stations[i];
    const auto& b = t.stations[i + 1];
    t.tracks.push_back(Track{a + ">" + b, a, b, Direction::Up, min_runs[i]});
    t.tracks.push_back(Track{b + ">" + a, b, a, Direction::Down, min_runs[i]});
  }
  return t;
}

int Topology::station_index(const std::string& station) const {
  auto it = std::find(stations.begin(), stations.end(), station);
  return it == stations.end() ? -1 : static_cast<int>(it - stations.begin());
}

const Track* Topology::find_track(const std::string& id) const {
  for (const auto& t : tracks) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const Track& Topology::track(const std::string& id) const {
  const Track* t = find_track(id);
  if (t == nullptr) throw ValidationError("/topology/tracks", "unknown track '" + id + "'");
  return *t;
}

const Track* Topology::track_between(const std::string& from, const std::string& to) const {
  for (const auto& t : tracks) {
    if (t.from == from && t.to == to) return &t;
  }
  return nullptr;
}

const Track& Topology::opposite_track(const Track& t) const {
  const Track* o = track_between(t.to, t.from);
  if (o == nullptr) throw ValidationError("/topology/tracks", "track '" + t.id + "' has no opposite track");
  return *o;
}

bool Topology::is_switch(const std::string& station) const {
  return std::find(switches.begin(), switches.end(), station) != switches.end();
}

const Depot* Topology::depot_at(const std::string& station) const {
  for (const auto& d : depots) {
    if (d.station == station) return &d;
  }
  return nullptr;
}

std::string Topology::platform(const std::string& station, Direction side) {
  return station + ":" + to_string(side);
}

std::vector<Seconds> Topology::cumulative_positions() const {
  std::vector<Seconds> pos(stations.size(), 0);
  for (std::size_t i = 1; i < stations.size(); ++i) {
    const Track* t = track_between(stations[i - 1], stations[i]);
    pos[i] = pos[i - 1] + (t != nullptr ? t->min_run : 0);
  }
  return pos;
}

void Topology::validate() const {
  if (stations.size() < 2) throw ValidationError("/topology/stations", "at least two stations are required");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (stations[i].empty()) throw ValidationError("/topology/stations/" + std::to_string(i), "empty station id");
    if (!seen.insert(stations[i]).second) {
      throw ValidationError("/topology/stations/" + std::to_string(i), "duplicate station '" + stations[i] + "'");
    }
  }
  std::set<std::string> track_ids;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const auto& t = tracks[i];
    const std::string path = "/topology/tracks/" + std::to_string(i);
    if (!track_ids.insert(t.id).second) throw ValidationError(path, "duplicate track '" + t.id + "'");
    const int a = station_index(t.from);
    const int b = station_index(t.to);
    if (a < 0) throw ValidationError(path, "unknown station '" + t.from + "'");
    if (b < 0) throw ValidationError(path, "unknown station '" + t.to + "'");
    if (std::abs(a - b) != 1) throw ValidationError(path, "track must join adjacent stations");
    if ((b > a) != (t.direction == Direction::Up)) throw ValidationError(path, "direction does not match station order");
    if (t.min_run <= 0) throw ValidationError(path, "min_run must be positive");
  }
  std::set<std::string> depot_ids;
  for (std::size_t i = 0; i < depots.size(); ++i) {
    const auto& d = depots[i];
    const std::string path = "/topology/depots/" + std::to_string(i);
    if (!depot_ids.insert(d.id).second) throw ValidationError(path, "duplicate depot '" + d.id + "'");
    if (!has_station(d.station)) throw ValidationError(path, "unknown station '" + d.station + "'");
    if (d.replacement_capacity < 0) throw ValidationError(path, "replacement_capacity must be >= 0");
    if (d.min_idle < 0) throw ValidationError(path, "min_idle must be >= 0");
    if (d.access_time < 0) throw ValidationError(path, "access_time must be >= 0");
  }
  for (std::size_t i = 0; i < switches.size(); ++i) {
    if (!has_station(switches[i])) {
      throw ValidationError("/topology/switches/" + std::to_string(i), "unknown station '" + switches[i] + "'");
    }
  }
}

const Trip* Timetable::find_trip(const std::string& id) const {
  for (const auto& t : trips) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

void Timetable::validate(const Topology& topology) const {
  if (cycle_time <= 0) throw ValidationError("/timetable/cycle_time", "must be positive");
  if (horizon.end <= horizon.start) throw ValidationError("/timetable/horizon", "end must be after start");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < trips.size(); ++i) {
    const auto& t = trips[i];
    const std::string path = "/timetable/trips/" + std::to_string(i);
    if (!index.emplace(t.id, i).second) throw ValidationError(path, "duplicate trip '" + t.id + "'");
    const Track* track = topology.find_track(t.track);
    if (track == nullptr) throw ValidationError(path + "/track", "unknown track '" + t.track + "'");
    if (track->from != t.from || track->to != t.to) {
      throw ValidationError(path + "/track", "track '" + t.track + "' does not connect " + t.from + " to " + t.to);
    }
    if (t.arrival <= t.departure) throw ValidationError(path, "arrival must be after departure");
    if (t.departure < horizon.start || t.arrival > horizon.end) throw ValidationError(path, "trip outside horizon");
  }
  std::set<std::string> used;
  for (std::size_t c = 0; c < circulations.size(); ++c) {
    const auto& circ = circulations[c];
    const std::string path = "/timetable/circulations/" + std::to_string(c);
    const Trip* prev = nullptr;
    for (std::size_t k = 0; k < circ.trips.size(); ++k) {
      auto it = index.find(circ.trips[k]);
      if (it == index.end()) throw ValidationError(path + "/trips/" + std::to_string(k), "unknown trip '" + circ.trips[k] + "'");
      if (!used.insert(circ.trips[k]).second) {
        throw ValidationError(path + "/trips/" + std::to_string(k), "trip '" + circ.trips[k] + "' in two circulations");
      }
      const Trip& cur = trips[it->second];
      if (cur.train != circ.vehicle) {
        throw ValidationError(path + "/trips/" + std::to_string(k), "trip '" + cur.id + "' belongs to train " + cur.train);
      }
      if (prev != nullptr) {
        if (prev->to != cur.from) {
          throw ValidationError(path + "/trips/" + std::to_string(k), "chain broken between '" + prev->id + "' and '" + cur.id + "'");
        }
        if (cur.departure < prev->arrival) {
          throw ValidationError(path + "/trips/" + std::to_string(k), "trip '" + cur.id + "' departs before its predecessor arrives");
        }
      }
      prev = &cur;
    }
  }
  if (used.size() != trips.size()) throw ValidationError("/timetable/circulations", "every trip must belong to a circulation");
}

namespace {

Seconds scheduled_run(Seconds min_run, double buffer_fraction) {
  // Round up to whole seconds; the epsilon absorbs binary representation noise.
  return static_cast<Seconds>(std::ceil(static_cast<double>(min_run) * (1.0 + buffer_fraction) - 1e-9));
}

}  // namespace

Timetable generate_cyclic_timetable(const Topology& topology, const GeneratorParams& params) {
  if (params.cycle_time <= 0) throw ValidationError("/generator/cycle_time", "must be positive");
  if (params.buffer_fraction < 0.0 || params.buffer_fraction >= 1.0) {
    throw ValidationError("/generator/buffer_fraction", "must lie in [0, 1)");
  }
  if (params.dwell < 0 || params.min_layover < 0) throw ValidationError("/generator", "dwell and layover must be >= 0");
  topology.validate();
  const std::size_t n_st = topology.stations.size();

  // Offsets of each up/down segment relative to the terminal departure.
  struct Leg {
    std::string from, to, track;
    Seconds dep_offset, arr_offset;
  };
  auto legs_for = [&](Direction dir) {
    std::vector<Leg> legs;
    Seconds t = 0;
    for (std::size_t k = 0; k + 1 < n_st; ++k) {
      const std::size_t i = dir == Direction::Up ? k : n_st - 1 - k;
      const std::size_t j = dir == Direction::Up ? i + 1 : i - 1;
      const Track* track = topology.track_between(topology.stations[i], topology.stations[j]);
      if (track == nullptr) {
        throw ValidationError("/topology/tracks", "missing track " + topology.stations[i] + ">" + topology.stations[j]);
      }
      const Seconds run = scheduled_run(track->min_run, params.buffer_fraction);
      legs.push_back(Leg{track->from, track->to, track->id, t, t + run});
      t += run + (k + 2 < n_st ? params.dwell : 0);
    }
    return legs;
  };
  const auto up = legs_for(Direction::Up);
  const auto down = legs_for(Direction::Down);
  const Seconds run_up = up.back().arr_offset;
  const Seconds run_down = down.back().arr_offset;
  if (params.horizon.length() < std::max(run_up, run_down)) {
    throw ValidationError("/generator/horizon", "horizon shorter than one terminal-to-terminal run");
  }

  const Seconds cycle = params.cycle_time;
  const Seconds min_round = run_up + run_down + 2 * params.min_layover;
  const Seconds vehicles = (min_round + cycle - 1) / cycle;
  const Seconds period = vehicles * cycle;
  const Seconds slack = period - run_up - run_down;
  const Seconds layover_far = slack / 2;

  Timetable tt;
  tt.cycle_time = cycle;
  tt.horizon = params.horizon;
  const int width = vehicles >= 10 ? 2 : 1;
  for (Seconds v = 0; v < vehicles; ++v) {
    std::string vid = std::to_string(v + 1);
    vid = "V" + std::string(static_cast<std::size_t>(std::max<int>(0, width - static_cast<int>(vid.size()))), '0') + vid;
    Circulation circ{vid, {}};
    const Seconds first = params.phase + v * cycle;
    // Earliest round trip that can still reach into the horizon.
    Seconds k = (params.horizon.start - first - period) / period - 1;
    int run_no = 0;
    for (;; ++k) {
      const Seconds up_dep = first + k * period;
      if (up_dep > params.horizon.end) break;
      const Seconds down_dep = up_dep + run_up + layover_far;
      for (int half = 0; half < 2; ++half) {
        const auto& legs = half == 0 ? up : down;
        const Seconds base = half == 0 ? up_dep : down_dep;
        std::vector<Trip> run_trips;
        for (const auto& leg : legs) {
          const Seconds dep = base + leg.dep_offset;
          const Seconds arr = base + leg.arr_offset;
          if (dep < params.horizon.start || arr > params.horizon.end) continue;
          run_trips.push_back(Trip{"", vid, "", leg.from, leg.to, leg.track, dep, arr});
        }
        if (run_trips.empty()) continue;
        ++run_no;
        const std::string line = vid + "/" + (half == 0 ? "U" : "D") + std::to_string(run_no);
        for (auto& trip : run_trips) {
          trip.line = line;
          trip.id = line + "/" + trip.from + "-" + trip.to;
          circ.trips.push_back(trip.id);
          tt.trips.push_back(std::move(trip));
        }
      }
    }
    if (!circ.trips.empty()) tt.circulations.push_back(std::move(circ));
  }
  return tt;
}

Timetable generate_cyclic_timetable(const Topology& topology, Seconds cycle_time, TimeWindow horizon,
                                    double buffer_fraction) {
  GeneratorParams p;
  p.cycle_time = cycle_time;
  p.horizon = horizon;
  p.buffer_fraction = buffer_fraction;
  p.phase = horizon.start;
  return generate_cyclic_timetable(topology, p);
}

double Policy::weight(const std::string& trip) const {
  auto it = weight_overrides.find(trip);
  return it == weight_overrides.end() ? default_weight : it->second;
}

void Scenario::validate() const {
  topology.validate();
  timetable.validate(topology);
  if (disruption.end < disruption.start) throw ValidationError("/disruption", "end must not precede start");
  for (std::size_t i = 0; i < disruption.tracks.size(); ++i) {
    if (topology.find_track(disruption.tracks[i]) == nullptr) {
      throw ValidationError("/disruption/tracks/" + std::to_string(i),
                            "blocked track '" + disruption.tracks[i] + "' is not in the topology");
    }
  }
  if (disruption.active() &&
      (disruption.start < timetable.horizon.start || disruption.end > timetable.horizon.end)) {
    throw ValidationError("/disruption", "blocked interval must lie within the timetable horizon");
  }
  if (policy.max_delay < 0) throw ValidationError("/policy/max_delay", "must be >= 0");
  if (policy.max_delay > timetable.cycle_time) throw ValidationError("/policy/max_delay", "must not exceed the cycle time");
  if (policy.recovery < 0) throw ValidationError("/policy/recovery", "must be >= 0");
  if (policy.safety_margin < 0) throw ValidationError("/policy/safety_margin", "must be >= 0");
  if (policy.min_turnaround < 0) throw ValidationError("/policy/min_turnaround", "must be >= 0");
  if (policy.min_dwell < 0) throw ValidationError("/policy/min_dwell", "must be >= 0");
  if (policy.drive_stretch && *policy.drive_stretch < 0) throw ValidationError("/policy/drive_stretch", "must be >= 0");
  for (std::size_t i = 0; i < policy.turn_stations.size(); ++i) {
    if (!topology.is_switch(policy.turn_stations[i])) {
      throw ValidationError("/policy/turn_stations/" + std::to_string(i),
                            "turn station '" + policy.turn_stations[i] + "' is not a switch station");
    }
  }
  if (policy.default_weight < 0) throw ValidationError("/policy/weights/default", "weights must be >= 0");
  for (const auto& [trip, w] : policy.weight_overrides) {
    if (timetable.find_trip(trip) == nullptr) throw ValidationError("/policy/weights/overrides/" + trip, "unknown trip");
    if (w < 0) throw ValidationError("/policy/weights/overrides/" + trip, "weights must be >= 0");
  }
  for (const auto& [trip, l] : policy.max_drive_overrides) {
    const Trip* t = timetable.find_trip(trip);
    if (t == nullptr) throw ValidationError("/policy/max_drive_overrides/" + trip, "unknown trip");
    if (l < topology.track(t->track).min_run) {
      throw ValidationError("/policy/max_drive_overrides/" + trip, "L_max below the minimal driving time");
    }
  }
  if (policy.turn_penalty < 0 || policy.return_penalty < 0) throw ValidationError("/policy/penalties", "must be >= 0");
  if (solver.time_limit < 0 || solver.node_limit < 0) throw ValidationError("/solver", "limits must be >= 0");
  if (solver.gap < 0 || solver.gap > 1) throw ValidationError("/solver/gap", "must lie in [0, 1]");
  for (const auto& trip : timetable.trips) {
    if (trip.arrival - trip.departure < topology.track(trip.track).min_run) {
      throw ValidationError("/timetable/trips/" + trip.id, "scheduled run shorter than the minimal driving time");
    }
  }
}

}  // namespace railrecover
