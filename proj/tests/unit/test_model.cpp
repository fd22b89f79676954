#include <algorithm>
#include <set>

#include "support.hpp"

using namespace rrtest;

TEST_SUITE("model") {

TEST_CASE("generator scales minimal runs by the buffer and rounds up") {
  Topology topo = Topology::make_line({"A", "B", "C"}, {300, 300});
  topo.switches = {"A", "C"};
  GeneratorParams g;
  g.cycle_time = 600;
  g.horizon = {0, 3600};
  g.buffer_fraction = 0.10;
  const Timetable tt = generate_cyclic_timetable(topo, g);
  REQUIRE(!tt.trips.empty());
  for (const Trip& t : tt.trips) CHECK(t.arrival - t.departure == 330);

  g.buffer_fraction = 0.101;  // 330.3 -> 331
  for (const Trip& t : generate_cyclic_timetable(topo, g).trips) CHECK(t.arrival - t.departure == 331);
}

TEST_CASE("generator keeps the frequency in each direction") {
  const Scenario s = fixtures::u6_like(600, 300);
  std::vector<Seconds> up;
  std::vector<Seconds> down;
  for (const Trip& t : s.timetable.trips) {
    if (t.from == "ST01") up.push_back(t.departure);
    if (t.from == "ST24") down.push_back(t.departure);
  }
  std::sort(up.begin(), up.end());
  std::sort(down.begin(), down.end());
  REQUIRE(up.size() >= 6);
  REQUIRE(down.size() >= 6);
  for (std::size_t i = 1; i < up.size(); ++i) CHECK(up[i] - up[i - 1] == 600);
  for (std::size_t i = 1; i < down.size(); ++i) CHECK(down[i] - down[i - 1] == 600);
  const auto in_hour = [](const std::vector<Seconds>& d) {
    return std::count_if(d.begin(), d.end(), [&](Seconds t) { return t >= d.front() && t < d.front() + 3600; });
  };
  CHECK(in_hour(up) == 6);
  CHECK(in_hour(down) == 6);
}

TEST_CASE("generator rejects a horizon shorter than one run") {
  Topology topo = Topology::make_line({"A", "B", "C"}, {300, 300});
  GeneratorParams g;
  g.cycle_time = 600;
  g.horizon = {0, 500};
  CHECK_THROWS_AS((void)generate_cyclic_timetable(topo, g), Error);
}

TEST_CASE("scenario validation rejects broken references") {
  Scenario s = fixtures::mini_line();
  s.disruption.tracks = {"A>Z"};
  CHECK_THROWS_AS(s.validate(), ValidationError);

  s = fixtures::mini_line();
  s.policy.turn_stations = {"B"};  // B has no switch in the plain fixture
  CHECK_THROWS_AS(s.validate(), ValidationError);

  s = fixtures::mini_line();
  s.timetable.circulations[0].trips = {s.timetable.circulations[0].trips[1], s.timetable.circulations[0].trips[0]};
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("undisturbed network has one event pair per trip and no opposite headways") {
  const Scenario s = fixtures::undisturbed(fixtures::mini_line());
  const Network n = build_network(s);
  CHECK(n.count(EventKind::Departure) == s.timetable.trips.size());
  CHECK(n.count(EventKind::Arrival) == s.timetable.trips.size());
  CHECK(n.count(ActivityKind::Drive) == s.timetable.trips.size());
  for (ActivityId a : of_kind(n, ActivityKind::TrackHeadway)) {
    CHECK(n.event(n.activity(a).tail).direction == n.event(n.activity(a).head).direction);
  }
  CHECK(n.count(ActivityKind::StationHeadway) == 0);
}

TEST_CASE("blocked trips are rerouted onto the opposite track and paired") {
  const Scenario s = fixtures::mini_line();
  const Network n = build_network(s);
  std::size_t rerouted = 0;
  for (const Activity& a : n.activities) {
    if (a.kind != ActivityKind::Drive) continue;
    if (a.rerouted) {
      ++rerouted;
      CHECK(s.topology.track(a.track).direction != n.event(a.tail).direction);
    }
  }
  CHECK(rerouted == 2);

  const auto heads = of_kind(n, ActivityKind::TrackHeadway);
  REQUIRE(heads.size() == 4);  // one pair per shared segment
  for (ActivityId id : heads) {
    const Activity& a = n.activity(id);
    const Activity& p = n.activity(a.partner);
    CHECK(p.partner == a.id);
    CHECK(p.tail == a.head);
    CHECK(p.head == a.tail);
    // Opposite trains: transit on the shared segment plus the margin.
    CHECK(n.event(a.tail).direction != n.event(a.head).direction);
    const Activity& drive = n.activity(*n.drive_from(a.tail));
    CHECK(a.headway == *drive.l_max + 60);
  }
}

TEST_CASE("opposite headway with the minimal transit basis") {
  Scenario s = fixtures::mini_line();
  s.policy.opposite_headway = TransitBasis::Min;
  const Network n = build_network(s);
  for (ActivityId id : of_kind(n, ActivityKind::TrackHeadway)) CHECK(n.activity(id).headway == 300 + 60);
}

TEST_CASE("same-direction departures on a shared track get the safety margin") {
  Scenario s = fixtures::mini_line();
  // A second Down train five minutes behind T2.
  const Track* cb = s.topology.track_between("C", "B");
  const Track* ba = s.topology.track_between("B", "A");
  s.timetable.trips.push_back(Trip{"T3/C-B", "T3", "T3/D1", "C", "B", cb->id, 300, 600});
  s.timetable.trips.push_back(Trip{"T3/B-A", "T3", "T3/D1", "B", "A", ba->id, 620, 920});
  s.timetable.circulations.push_back({"T3", {"T3/C-B", "T3/B-A"}});
  const Network n = build_network(s);
  const auto conflicts = enumerate_track_conflicts(n, s);
  bool found = false;
  for (const auto& c : conflicts) {
    if (!c.same_direction) continue;
    found = true;
    CHECK(c.headway_first_second == 60);
    CHECK(c.headway_second_first == 60);
    CHECK(c.first != c.second);
  }
  CHECK(found);
}

TEST_CASE("trips blocked without a reroute are not selectable") {
  Scenario s = fixtures::mini_line();
  s.topology.switches.clear();
  const Network n = build_network(s);
  std::size_t blocked = 0;
  for (const Activity& a : n.activities) {
    if (a.kind == ActivityKind::Drive && !a.selectable) ++blocked;
  }
  CHECK(blocked == 2);
  CHECK(n.count(ActivityKind::TrackHeadway) == 0);
}

TEST_CASE("single track through a station gives one conflict with one coupled pair") {
  const Network n = build_network(fixtures::mini_line());
  REQUIRE(!n.station_conflicts.empty());
  for (const StationConflict& c : n.station_conflicts) {
    CHECK(c.pairs.size() == 1);
    CHECK(c.margin == 60);
    // The mirrored conflict exists.
    const bool mirrored = std::any_of(n.station_conflicts.begin(), n.station_conflicts.end(), [&](const auto& o) {
      return o.arrival == c.other_arrival && o.other_arrival == c.arrival;
    });
    CHECK(mirrored);
  }
}

TEST_CASE("turn options multiply the coupled pairs") {
  const Network n = build_network(fixtures::mini_line(true));
  REQUIRE(n.count(ActivityKind::Turn) > 0);
  // One coupled pair per combination of successor departures (wait or turn).
  const auto successors = [&](EventId v) {
    std::size_t k = 0;
    for (ActivityId a : n.flow_out(v)) {
      const ActivityKind kind = n.activity(a).kind;
      k += kind == ActivityKind::Wait || kind == ActivityKind::Turn ? 1 : 0;
    }
    return k;
  };
  std::size_t max_pairs = 0;
  for (const StationConflict& c : n.station_conflicts) {
    CHECK(c.pairs.size() == successors(c.arrival) * successors(c.other_arrival));
    max_pairs = std::max(max_pairs, c.pairs.size());
  }
  CHECK(max_pairs == 4);  // both trains may continue or turn at B
  for (ActivityId t : of_kind(n, ActivityKind::Turn)) {
    const Activity& a = n.activity(t);
    CHECK(n.event(a.tail).kind == EventKind::Arrival);
    CHECK(n.event(a.head).kind == EventKind::Departure);
    CHECK(n.event(a.tail).trip != n.event(a.head).trip);
  }
}

TEST_CASE("safety margins against the alignment bound") {
  // L_max - L_min equals the stretch on both sides.
  CHECK(validate_safety_margins(build_network(fixtures::fig1(31, 60))).empty());
  CHECK(validate_safety_margins(build_network(fixtures::fig1(1, 0))).empty());
  const auto v = validate_safety_margins(build_network(fixtures::fig1(30, 60)));
  REQUIRE(!v.empty());
  for (const auto& m : v) {
    CHECK(m.max_slack == 60);
    CHECK(m.required == 31);
  }
}

TEST_CASE("replacement trains only enter at or after the blockage start") {
  const Scenario s = fixtures::u6_like(600, 300);
  const Network n = build_network(s);
  const auto repl = of_kind(n, ActivityKind::Replacement);
  CHECK(!repl.empty());
  for (ActivityId id : repl) CHECK(*n.event(n.activity(id).head).time >= s.disruption.start);
}

TEST_CASE("network build is deterministic and structurally valid") {
  for (std::uint64_t seed : {1u, 7u, 42u}) {
    const Scenario s = fixtures::random_instance(seed);
    const Network a = build_network(s);
    const Network b = build_network(s);
    CHECK(a == b);
    CHECK_NOTHROW(a.validate());
  }
}

TEST_CASE("track conflicts match a pairwise re-enumeration") {
  fixtures::RandomOptions small;
  small.max_trips = 8;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Scenario s = fixtures::random_instance(seed, small);
    const Network n = build_network(s);
    // Tracks used in both directions.
    std::map<std::string, std::set<Direction>> dirs;
    for (const Activity& a : n.activities) {
      if (a.kind == ActivityKind::Drive && a.selectable) dirs[a.track].insert(n.event(a.tail).direction);
    }
    std::set<std::pair<EventId, EventId>> expected;
    for (const Activity& a : n.activities) {
      for (const Activity& b : n.activities) {
        if (a.kind != ActivityKind::Drive || b.kind != ActivityKind::Drive || !a.selectable || !b.selectable) continue;
        if (a.track != b.track || dirs[a.track].size() < 2 || !(a.tail < b.tail)) continue;
        const Event& v = n.event(a.tail);
        const Event& w = n.event(b.tail);
        const bool same = v.direction == w.direction;
        const Seconds S = s.policy.safety_margin;
        const Seconds l_vw = same ? S : *a.l_max + S;
        const Seconds l_wv = same ? S : *b.l_max + S;
        // Some admissible delays break each order: scan the delay grid.
        bool vw_can_fail = false;
        bool wv_can_fail = false;
        for (Seconds xv = 0; xv <= v.max_delay; xv += std::max<Seconds>(1, v.max_delay / 20)) {
          for (Seconds xw = 0; xw <= w.max_delay; xw += std::max<Seconds>(1, w.max_delay / 20)) {
            vw_can_fail |= *w.time + xw < *v.time + xv + l_vw;
            wv_can_fail |= *v.time + xv < *w.time + xw + l_wv;
          }
          vw_can_fail |= *w.time < *v.time + v.max_delay + l_vw;
          wv_can_fail |= *v.time < *w.time + w.max_delay + l_wv;
        }
        if (vw_can_fail && wv_can_fail) expected.insert({v.id, w.id});
      }
    }
    std::set<std::pair<EventId, EventId>> got;
    for (const auto& c : enumerate_track_conflicts(n, s)) got.insert({c.first, c.second});
    CHECK_MESSAGE(got == expected, "seed " << seed);
  }
}

}  // TEST_SUITE
