#include "railrecover/fixtures.hpp"

#include <algorithm>
#include <random>

namespace railrecover::fixtures {

namespace {

Trip leg(const Topology& topo, const std::string& train, const std::string& line, const std::string& from,
         const std::string& to, Seconds dep, Seconds arr) {
  const Track* t = topo.track_between(from, to);
  return Trip{line + "/" + from + "-" + to, train, line, from, to, t->id, dep, arr};
}

Scenario two_train_line(Seconds cycle, Seconds max_delay, Seconds margin) {
  Scenario s;
  s.name = "mini_line";
  s.topology = Topology::make_line({"A", "B", "C"}, {300, 300});
  s.topology.switches = {"A", "C"};
  auto& tt = s.timetable;
  tt.cycle_time = cycle;
  tt.horizon = {0, 3600};
  tt.trips = {
      leg(s.topology, "T1", "T1/U1", "A", "B", 0, 300),
      leg(s.topology, "T1", "T1/U1", "B", "C", 320, 620),
      leg(s.topology, "T2", "T2/D1", "C", "B", 0, 300),
      leg(s.topology, "T2", "T2/D1", "B", "A", 320, 620),
  };
  tt.circulations = {{"T1", {tt.trips[0].id, tt.trips[1].id}}, {"T2", {tt.trips[2].id, tt.trips[3].id}}};
  s.disruption.tracks = {"A>B", "B>C"};
  s.disruption.start = 0;
  s.disruption.end = 1800;
  s.policy.max_delay = max_delay;
  s.policy.recovery = 1200;
  s.policy.safety_margin = margin;
  s.policy.min_turnaround = 60;
  s.policy.min_dwell = 20;
  return s;
}

}  // namespace

Scenario mini_line(bool turn_at_b) {
  Scenario s = two_train_line(300, 300, 60);
  if (turn_at_b) {
    s.name = "mini_line_turn";
    s.topology.switches = {"A", "B", "C"};
    s.policy.turn_stations = {"B"};
  }
  return s;
}

Scenario fig1(Seconds safety_margin, Seconds stretch) {
  Scenario s = two_train_line(900, 900, safety_margin);
  s.name = "fig1";
  s.policy.drive_stretch = stretch;
  s.policy.opposite_headway = TransitBasis::Min;
  return s;
}

Scenario random_instance(std::uint64_t seed, const RandomOptions& options) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](Seconds lo, Seconds hi) { return std::uniform_int_distribution<Seconds>(lo, hi)(rng); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  Scenario s;
  s.name = "random_" + std::to_string(seed);
  const int n = static_cast<int>(uniform(options.stations_min, options.stations_max));
  std::vector<std::string> names;
  std::vector<Seconds> runs;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('A' + i)));
  for (int i = 0; i + 1 < n; ++i) runs.push_back(uniform(4, 10) * 30);
  s.topology = Topology::make_line(names, runs);

  const Seconds cycle = uniform(5, 10) * 60;
  s.timetable.cycle_time = cycle;
  s.timetable.horizon = {0, 7200};
  s.policy.max_delay = std::min(cycle, uniform(2, 6) * 60);
  s.policy.safety_margin = uniform(1, 4) * 20;
  s.policy.min_dwell = 20;
  s.policy.min_turnaround = 60;
  s.policy.recovery = uniform(10, 30) * 60;
  if (coin(0.5)) s.policy.drive_stretch = uniform(0, 4) * 15;

  // Vehicles shuttle from a terminal with a random number of legs.
  const int vehicles = static_cast<int>(uniform(2, 3));
  int budget = options.max_trips;
  for (int v = 0; v < vehicles && budget > 0; ++v) {
    const std::string train = "T" + std::to_string(v + 1);
    int pos = coin(0.5) ? 0 : n - 1;
    int dir = pos == 0 ? 1 : -1;
    Seconds t = uniform(0, 20) * 30;
    const int legs = static_cast<int>(std::min<Seconds>(budget, uniform(1, std::max(1, options.max_trips / vehicles + 1))));
    Circulation circ{train, {}};
    int run_no = 1;
    for (int k = 0; k < legs; ++k) {
      if (pos + dir < 0 || pos + dir >= n) {
        dir = -dir;
        ++run_no;
        t += uniform(2, 6) * 30;
      }
      const std::string line = train + (dir > 0 ? "/U" : "/D") + std::to_string(run_no);
      const Seconds min_run = runs[static_cast<std::size_t>(std::min(pos, pos + dir))];
      const Seconds run = min_run + uniform(0, 2) * 15;
      Trip trip = leg(s.topology, train, line, names[static_cast<std::size_t>(pos)],
                      names[static_cast<std::size_t>(pos + dir)], t, t + run);
      circ.trips.push_back(trip.id);
      s.timetable.trips.push_back(std::move(trip));
      t += run + 20 + uniform(0, 2) * 10;
      pos += dir;
    }
    budget -= legs;
    s.timetable.circulations.push_back(std::move(circ));
  }

  // Block a run of Up tracks.
  const int first = static_cast<int>(uniform(0, n - 2));
  const int last = static_cast<int>(uniform(first, n - 2));
  for (int i = first; i <= last; ++i) s.disruption.tracks.push_back(names[static_cast<std::size_t>(i)] + ">" + names[static_cast<std::size_t>(i + 1)]);
  s.disruption.start = uniform(0, 10) * 60;
  s.disruption.end = s.disruption.start + uniform(1, 6) * 300;

  std::vector<std::string> switches;
  for (int i = 0; i < n; ++i) {
    const bool end_of_section = i == first || i == last + 1;
    if ((end_of_section && coin(0.85)) || coin(0.3)) switches.push_back(names[static_cast<std::size_t>(i)]);
  }
  s.topology.switches = switches;
  for (const auto& st : switches) {
    if (coin(0.4)) s.policy.turn_stations.push_back(st);
  }
  if (coin(0.4)) {
    const auto& st = names[static_cast<std::size_t>(uniform(0, n - 1))];
    s.topology.depots.push_back(Depot{"D" + st, st, static_cast<int>(uniform(0, 1)), uniform(1, 4) * 60, 60});
    if (coin(0.5)) s.policy.return_penalty = uniform(0, 2) * 0.5;
  }
  if (coin(0.3)) s.policy.turn_penalty = uniform(1, 2) * 0.5;
  if (coin(0.3) && !s.timetable.trips.empty()) {
    s.policy.weight_overrides[s.timetable.trips[static_cast<std::size_t>(uniform(0, static_cast<Seconds>(s.timetable.trips.size()) - 1))].id] = 2.0;
  }
  return s;
}

Scenario u6_like(Seconds cycle, Seconds blockage) {
  Scenario s;
  s.name = "u6_like";
  std::vector<std::string> names;
  for (int i = 1; i <= 24; ++i) names.push_back(std::string(i < 10 ? "ST0" : "ST") + std::to_string(i));
  // Synthetic minimal runs; the section ST12-ST15 is the slow bottleneck.
  const std::vector<Seconds> runs = {62, 50, 55, 58, 70, 52, 56, 60, 48, 64, 58, 118, 126, 110,
                                     54, 50, 47, 56, 52, 55, 63, 50, 54};
  s.topology = Topology::make_line(names, runs);
  s.topology.switches = {"ST01", "ST03", "ST08", "ST12", "ST15", "ST19", "ST24"};
  s.topology.depots = {Depot{"DEP03", "ST03", 1, 300, 60}, Depot{"DEP12", "ST12", 1, 300, 60},
                       Depot{"DEP24", "ST24", 1, 300, 60}};

  const Seconds t0 = 7200;
  s.disruption.tracks = {"ST12>ST13", "ST13>ST14", "ST14>ST15"};
  s.disruption.start = t0;
  s.disruption.end = t0 + blockage;
  s.policy.max_delay = cycle;
  s.policy.recovery = 3600;
  s.policy.safety_margin = 60;
  s.policy.min_turnaround = 60;
  s.policy.min_dwell = 20;
  s.policy.turn_stations = {"ST12", "ST15"};

  GeneratorParams g;
  g.cycle_time = cycle;
  g.horizon = {t0 - 900, s.recovery_end() + 300};
  g.buffer_fraction = 0.1;
  g.dwell = 20;
  g.min_layover = 120;
  g.phase = 0;
  s.generator = g;
  s.timetable = generate_cyclic_timetable(s.topology, g);
  return s;
}

Scenario undisturbed(Scenario scenario) {
  scenario.disruption = Disruption{};
  return scenario;
}

}  // namespace railrecover::fixtures
