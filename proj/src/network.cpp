#include "railrecover/network.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace railrecover {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Departure: return "departure";
    case EventKind::Arrival: return "arrival";
    case EventKind::DepotArrival: return "depot_arrival";
    case EventKind::ReplacementSource: return "replacement_source";
    case EventKind::Origin: return "origin";
    case EventKind::Sink: return "sink";
  }
  return "?";
}

const char* to_string(ActivityKind kind) {
  switch (kind) {
    case ActivityKind::Drive: return "drive";
    case ActivityKind::Wait: return "wait";
    case ActivityKind::Turn: return "turn";
    case ActivityKind::Return: return "return";
    case ActivityKind::DepotReinsert: return "depot_reinsert";
    case ActivityKind::Replacement: return "replacement";
    case ActivityKind::Start: return "start";
    case ActivityKind::Finish: return "finish";
    case ActivityKind::TrackHeadway: return "track_headway";
    case ActivityKind::StationHeadway: return "station_headway";
  }
  return "?";
}

bool is_flow(ActivityKind kind) { return !is_headway(kind); }

bool is_train(ActivityKind kind) {
  return kind == ActivityKind::Drive || kind == ActivityKind::Wait || kind == ActivityKind::Turn;
}

bool is_headway(ActivityKind kind) {
  return kind == ActivityKind::TrackHeadway || kind == ActivityKind::StationHeadway;
}

std::string Event::label() const {
  switch (kind) {
    case EventKind::Departure: return "dep " + trip;
    case EventKind::Arrival: return "arr " + trip;
    case EventKind::DepotArrival: return "depot " + depot + "@" + std::to_string(time.value_or(0));
    case EventKind::ReplacementSource: return "replacement " + depot;
    case EventKind::Origin: return "origin " + train;
    case EventKind::Sink: return "sink " + train;
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Network

namespace {
const std::vector<ActivityId> kNoActivities;
}

const std::vector<ActivityId>& Network::flow_in(EventId id) const {
  return id.index() < in_.size() ? in_[id.index()] : kNoActivities;
}

const std::vector<ActivityId>& Network::flow_out(EventId id) const {
  return id.index() < out_.size() ? out_[id.index()] : kNoActivities;
}

const std::vector<ActivityId>& Network::headways_at(EventId id) const {
  return id.index() < headways_.size() ? headways_[id.index()] : kNoActivities;
}

std::optional<ActivityId> Network::drive_from(EventId departure) const {
  for (ActivityId a : flow_out(departure)) {
    if (activity(a).kind == ActivityKind::Drive) return a;
  }
  return std::nullopt;
}

const StationConflict* Network::conflict_for(ActivityId station_arc) const {
  auto it = conflict_index_.find(station_arc.value);
  return it == conflict_index_.end() ? nullptr : &station_conflicts[it->second];
}

std::size_t Network::trip_count() const {
  std::size_t n = 0;
  for (const auto& a : activities) {
    if (a.kind == ActivityKind::Drive) n += a.trips.size();
  }
  return n;
}

std::size_t Network::count(ActivityKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(activities.begin(), activities.end(), [&](const Activity& a) { return a.kind == kind; }));
}

std::size_t Network::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.kind == kind; }));
}

void Network::reindex() {
  in_.assign(events.size(), {});
  out_.assign(events.size(), {});
  headways_.assign(events.size(), {});
  for (const auto& a : activities) {
    if (is_flow(a.kind)) {
      out_.at(a.tail.index()).push_back(a.id);
      in_.at(a.head.index()).push_back(a.id);
    } else {
      headways_.at(a.tail.index()).push_back(a.id);
      headways_.at(a.head.index()).push_back(a.id);
    }
  }
  conflict_index_.clear();
  for (std::size_t i = 0; i < station_conflicts.size(); ++i) conflict_index_[station_conflicts[i].arc.value] = i;
}

void Network::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("/network", what); };
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].id.index() != i) fail("event ids must be dense");
    if (events[i].time && *events[i].time < 0) fail("negative event time at " + events[i].label());
    if (events[i].max_delay < 0) fail("negative delay bound");
  }
  for (std::size_t i = 0; i < activities.size(); ++i) {
    const Activity& a = activities[i];
    if (a.id.index() != i) fail("activity ids must be dense");
    if (a.tail.index() >= events.size() || a.head.index() >= events.size()) fail("activity endpoint out of range");
    const Event& t = event(a.tail);
    const Event& h = event(a.head);
    const std::string where = std::string(to_string(a.kind)) + " " + std::to_string(a.id.value);
    if (a.l_min < 0 || a.headway < 0 || a.margin < 0) fail("negative duration on " + where);
    if (a.cost < 0 || a.penalty < 0) fail("negative weight on " + where);
    switch (a.kind) {
      case ActivityKind::Drive:
        if (t.kind != EventKind::Departure || h.kind != EventKind::Arrival) fail(where + " must join departure to arrival");
        if (!a.l_max || *a.l_max < a.l_min) fail(where + " needs L_min <= L_max");
        if (a.trips.empty() || t.trip != a.trips.front() || h.trip != a.trips.back()) fail(where + " endpoints belong to other trips");
        break;
      case ActivityKind::Wait:
      case ActivityKind::Turn:
        if (t.kind != EventKind::Arrival || h.kind != EventKind::Departure) fail(where + " must join arrival to departure");
        break;
      case ActivityKind::Return:
        if (t.kind != EventKind::Arrival || h.kind != EventKind::DepotArrival) fail(where + " must end at a depot");
        break;
      case ActivityKind::DepotReinsert:
        if (t.kind != EventKind::DepotArrival || h.kind != EventKind::Departure) fail(where + " must leave a depot");
        break;
      case ActivityKind::Replacement:
        if (t.kind != EventKind::ReplacementSource || h.kind != EventKind::Departure) fail(where + " must leave a source");
        break;
      case ActivityKind::Start:
        if (t.kind != EventKind::Origin || h.kind != EventKind::Departure) fail(where + " must leave an origin");
        break;
      case ActivityKind::Finish:
        if (t.kind != EventKind::Arrival || h.kind != EventKind::Sink) fail(where + " must end at a sink");
        break;
      case ActivityKind::TrackHeadway: {
        if (t.kind != EventKind::Departure || h.kind != EventKind::Departure) fail(where + " must join departures");
        if (!a.partner.valid() || a.partner.index() >= activities.size()) fail(where + " has no reverse partner");
        const Activity& p = activity(a.partner);
        if (p.kind != ActivityKind::TrackHeadway || p.tail != a.head || p.head != a.tail || p.partner != a.id) {
          fail(where + " has no reverse partner");
        }
        break;
      }
      case ActivityKind::StationHeadway: {
        if (t.kind != EventKind::Arrival || h.kind != EventKind::Arrival) fail(where + " must join arrivals");
        if (!a.partner.valid() || a.partner.index() >= activities.size()) fail(where + " has no reverse partner");
        const Activity& p = activity(a.partner);
        if (p.tail != a.head || p.head != a.tail) fail(where + " has no reverse partner");
        if (conflict_for(a.id) == nullptr) fail(where + " has no conflict record");
        break;
      }
    }
  }
  for (const auto& e : events) {
    if (e.kind == EventKind::ReplacementSource && !flow_in(e.id).empty()) fail("replacement source with inflow");
    if (e.kind == EventKind::Origin && !flow_in(e.id).empty()) fail("origin with inflow");
    if (e.kind == EventKind::DepotArrival) {
      for (ActivityId a : flow_out(e.id)) {
        if (activity(a).kind != ActivityKind::DepotReinsert) fail("depot arrival leaves by a non-reinsert arc");
      }
    }
  }
  for (const auto& c : station_conflicts) {
    for (const auto& p : c.pairs) {
      const Activity& own = activity(p.own);
      const Activity& other = activity(p.other);
      if (own.tail != c.arrival || other.tail != c.other_arrival) fail("coupled pair does not leave the conflicting arrivals");
      if (own.kind != ActivityKind::Wait && own.kind != ActivityKind::Turn) fail("coupled activity must be a wait or turn");
      if (other.kind != ActivityKind::Wait && other.kind != ActivityKind::Turn) fail("coupled activity must be a wait or turn");
    }
  }
}

// ---------------------------------------------------------------------------
// Construction

namespace {

struct Section {
  Direction direction;
  int first = 0;  // station index range [first, last], in station order
  int last = 0;
  bool reroutable = false;
};

struct BuildContext {
  const Scenario& scenario;
  const Topology& topo;
  std::set<std::string> blocked;
  std::vector<Section> sections;

  explicit BuildContext(const Scenario& s) : scenario(s), topo(s.topology) {
    if (!s.disruption.active()) return;
    blocked.insert(s.disruption.tracks.begin(), s.disruption.tracks.end());
    // Group blocked tracks into maximal contiguous runs per direction.
    for (Direction dir : {Direction::Up, Direction::Down}) {
      std::vector<int> lows;
      for (const auto& id : blocked) {
        const Track& t = topo.track(id);
        if (t.direction != dir) continue;
        lows.push_back(std::min(topo.station_index(t.from), topo.station_index(t.to)));
      }
      std::sort(lows.begin(), lows.end());
      for (std::size_t i = 0; i < lows.size();) {
        std::size_t j = i;
        while (j + 1 < lows.size() && lows[j + 1] == lows[j] + 1) ++j;
        Section sec{dir, lows[i], lows[j] + 1, false};
        bool opposite_free = true;
        for (int k = sec.first; k < sec.last; ++k) {
          const auto& a = topo.stations[static_cast<std::size_t>(k)];
          const auto& b = topo.stations[static_cast<std::size_t>(k + 1)];
          const Track* opp = dir == Direction::Up ? topo.track_between(b, a) : topo.track_between(a, b);
          if (opp == nullptr || blocked.count(opp->id) != 0) opposite_free = false;
        }
        sec.reroutable = opposite_free && topo.is_switch(topo.stations[static_cast<std::size_t>(sec.first)]) &&
                         topo.is_switch(topo.stations[static_cast<std::size_t>(sec.last)]);
        sections.push_back(sec);
        i = j + 1;
      }
    }
  }

  [[nodiscard]] const Section* section_of(const Track& t) const {
    const int lo = std::min(topo.station_index(t.from), topo.station_index(t.to));
    for (const auto& s : sections) {
      if (s.direction == t.direction && lo >= s.first && lo < s.last) return &s;
    }
    return nullptr;
  }

  [[nodiscard]] bool interior(const Section& s, const std::string& station) const {
    const int i = topo.station_index(station);
    return i > s.first && i < s.last;
  }

  [[nodiscard]] Seconds delay_cap(Seconds time) const {
    const auto& d = scenario.disruption;
    if (d.active() && (time < d.start || time >= scenario.recovery_end())) return 0;
    return scenario.policy.max_delay;
  }

  [[nodiscard]] bool in_dispatch_window(Seconds time) const {
    const auto& d = scenario.disruption;
    return d.active() && time >= d.start && time < scenario.recovery_end();
  }
};

struct TripPlan {
  const Trip* trip = nullptr;
  std::string track;
  bool rerouted = false;
  bool selectable = true;
  Direction direction = Direction::Up;
  std::string dep_platform;
  std::string arr_platform;
  EventId dep;
  EventId arr;
};

}  // namespace

Network build_base_network(const Scenario& scenario) {
  scenario.validate();
  const BuildContext ctx(scenario);
  const Topology& topo = scenario.topology;
  const Timetable& tt = scenario.timetable;
  const Policy& policy = scenario.policy;

  Network net;
  net.max_delay = policy.max_delay;
  if (scenario.disruption.active()) net.disruption = scenario.disruption;

  // Trip plans: reroute or disable drives entering a blocked track.
  std::vector<TripPlan> plans;
  plans.reserve(tt.trips.size());
  std::set<std::string> shared_platforms;
  for (const auto& trip : tt.trips) {
    TripPlan p;
    p.trip = &trip;
    const Track& track = topo.track(trip.track);
    p.track = track.id;
    p.direction = track.direction;
    const Section* section = nullptr;
    if (ctx.blocked.count(track.id) != 0) {
      const auto& d = scenario.disruption;
      const Seconds cap = ctx.delay_cap(trip.departure);
      const bool may_enter = trip.departure < d.end && trip.departure + cap >= d.start;
      if (may_enter) {
        section = ctx.section_of(track);
        if (section != nullptr && section->reroutable) {
          p.rerouted = true;
          p.track = topo.opposite_track(track).id;
        } else {
          p.selectable = false;
          section = nullptr;
        }
      }
    }
    const Direction own = p.direction;
    const Direction other = opposite(own);
    const bool dep_swap = p.rerouted && ctx.interior(*section, trip.from);
    const bool arr_swap = p.rerouted && ctx.interior(*section, trip.to);
    p.dep_platform = Topology::platform(trip.from, dep_swap ? other : own);
    p.arr_platform = Topology::platform(trip.to, arr_swap ? other : own);
    if (arr_swap) shared_platforms.insert(p.arr_platform);
    plans.push_back(std::move(p));
  }

  // Trip events ordered by (time, station, train, kind).
  struct Pending {
    Seconds time;
    int station;
    std::string train;
    int kind;
    std::size_t plan;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const Trip& t = *plans[i].trip;
    pending.push_back({t.departure, topo.station_index(t.from), t.train, 1, i});
    pending.push_back({t.arrival, topo.station_index(t.to), t.train, 0, i});
  }
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.time, a.station, a.train, a.kind, a.plan) < std::tie(b.time, b.station, b.train, b.kind, b.plan);
  });
  for (const auto& pe : pending) {
    TripPlan& p = plans[pe.plan];
    const Trip& t = *p.trip;
    Event e;
    e.id = EventId(static_cast<std::int32_t>(net.events.size()));
    e.kind = pe.kind == 1 ? EventKind::Departure : EventKind::Arrival;
    e.station = pe.kind == 1 ? t.from : t.to;
    e.platform = pe.kind == 1 ? p.dep_platform : p.arr_platform;
    e.time = pe.time;
    e.trip = t.id;
    e.train = t.train;
    e.direction = p.direction;
    e.max_delay = ctx.delay_cap(pe.time);
    (pe.kind == 1 ? p.dep : p.arr) = e.id;
    net.events.push_back(std::move(e));
  }

  std::map<std::string, std::size_t> plan_of;
  for (std::size_t i = 0; i < plans.size(); ++i) plan_of[plans[i].trip->id] = i;

  auto add_activity = [&](Activity a) -> ActivityId {
    a.id = ActivityId(static_cast<std::int32_t>(net.activities.size()));
    net.activities.push_back(std::move(a));
    return net.activities.back().id;
  };
  auto add_event = [&](Event e) -> EventId {
    e.id = EventId(static_cast<std::int32_t>(net.events.size()));
    net.events.push_back(std::move(e));
    return net.events.back().id;
  };

  // Drives, in departure order.
  std::vector<std::size_t> by_departure(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) by_departure[i] = i;
  std::sort(by_departure.begin(), by_departure.end(),
            [&](std::size_t a, std::size_t b) { return plans[a].dep < plans[b].dep; });
  for (std::size_t i : by_departure) {
    const TripPlan& p = plans[i];
    const Trip& t = *p.trip;
    const Seconds min_run = topo.track(p.track).min_run;
    const Seconds scheduled = t.arrival - t.departure;
    Seconds l_max = scheduled + policy.drive_stretch.value_or(2 * (scheduled - min_run));
    if (auto it = policy.max_drive_overrides.find(t.id); it != policy.max_drive_overrides.end()) l_max = it->second;
    Activity a;
    a.kind = ActivityKind::Drive;
    a.tail = p.dep;
    a.head = p.arr;
    a.l_min = min_run;
    a.l_max = std::max(l_max, min_run);
    a.cost = policy.weight(t.id);
    a.selectable = p.selectable;
    a.trips = {t.id};
    a.track = p.track;
    a.rerouted = p.rerouted;
    add_activity(std::move(a));
  }

  // Planned connections along each circulation.
  std::map<EventId, EventId> planned_successor;
  std::vector<std::pair<EventId, EventId>> waits;
  for (const auto& circ : tt.circulations) {
    for (std::size_t k = 0; k + 1 < circ.trips.size(); ++k) {
      const TripPlan& a = plans[plan_of.at(circ.trips[k])];
      const TripPlan& b = plans[plan_of.at(circ.trips[k + 1])];
      waits.emplace_back(a.arr, b.dep);
      planned_successor[a.arr] = b.dep;
    }
  }
  std::sort(waits.begin(), waits.end());
  for (const auto& [arr, dep] : waits) {
    const Event& ea = net.events[arr.index()];
    const Event& ed = net.events[dep.index()];
    const Trip& ta = *plans[plan_of.at(ea.trip)].trip;
    const Trip& td = *plans[plan_of.at(ed.trip)].trip;
    const Seconds gap = *ed.time - *ea.time;
    const Seconds wanted = ta.line == td.line ? policy.min_dwell : policy.min_turnaround;
    Activity a;
    a.kind = ActivityKind::Wait;
    a.tail = arr;
    a.head = dep;
    a.l_min = std::min(gap, wanted);
    add_activity(std::move(a));
  }

  // Vehicle origins and horizon sinks.
  std::vector<const Circulation*> circs;
  for (const auto& c : tt.circulations) {
    if (!c.trips.empty()) circs.push_back(&c);
  }
  std::sort(circs.begin(), circs.end(), [&](const Circulation* a, const Circulation* b) {
    return plans[plan_of.at(a->trips.front())].dep < plans[plan_of.at(b->trips.front())].dep;
  });
  for (const Circulation* c : circs) {
    const TripPlan& first = plans[plan_of.at(c->trips.front())];
    Event o;
    o.kind = EventKind::Origin;
    o.station = first.trip->from;
    o.train = c->vehicle;
    o.direction = first.direction;
    const EventId oid = add_event(std::move(o));
    Activity a;
    a.kind = ActivityKind::Start;
    a.tail = oid;
    a.head = first.dep;
    add_activity(std::move(a));
  }
  std::sort(circs.begin(), circs.end(), [&](const Circulation* a, const Circulation* b) {
    return plans[plan_of.at(a->trips.back())].arr < plans[plan_of.at(b->trips.back())].arr;
  });
  for (const Circulation* c : circs) {
    const TripPlan& last = plans[plan_of.at(c->trips.back())];
    Event s;
    s.kind = EventKind::Sink;
    s.station = last.trip->to;
    s.train = c->vehicle;
    s.direction = last.direction;
    const EventId sid = add_event(std::move(s));
    Activity a;
    a.kind = ActivityKind::Finish;
    a.tail = last.arr;
    a.head = sid;
    add_activity(std::move(a));
  }

  // Dispatching options inside the disruption and recovery window.
  std::vector<EventId> arrivals;
  std::vector<EventId> departures;
  for (const auto& e : net.events) {
    if (e.kind == EventKind::Arrival) arrivals.push_back(e.id);
    if (e.kind == EventKind::Departure) departures.push_back(e.id);
  }
  auto departure_usable = [&](EventId dep) { return plans[plan_of.at(net.events[dep.index()].trip)].selectable; };
  const Seconds cycle = tt.cycle_time;

  const std::set<std::string> turn_stations(policy.turn_stations.begin(), policy.turn_stations.end());
  for (EventId v : arrivals) {
    const Event& ev = net.events[v.index()];
    if (turn_stations.count(ev.station) == 0 || !ctx.in_dispatch_window(*ev.time)) continue;
    const Trip& tv = *plans[plan_of.at(ev.trip)].trip;
    auto planned = planned_successor.find(v);
    for (EventId w : departures) {
      const Event& ew = net.events[w.index()];
      if (ew.station != ev.station || ew.direction == ev.direction || !departure_usable(w)) continue;
      if (planned != planned_successor.end() && planned->second == w) continue;
      const Trip& tw = *plans[plan_of.at(ew.trip)].trip;
      if (tw.line == tv.line) continue;
      const Seconds earliest = *ev.time + policy.min_turnaround;
      if (*ew.time + ew.max_delay < earliest || *ew.time > earliest + cycle) continue;
      Activity a;
      a.kind = ActivityKind::Turn;
      a.tail = v;
      a.head = w;
      a.l_min = policy.min_turnaround;
      a.penalty = policy.turn_penalty;
      add_activity(std::move(a));
    }
  }

  for (const auto& depot : topo.depots) {
    net.depot_capacity[depot.id] = depot.replacement_capacity;
    for (EventId v : arrivals) {
      const Event& ev = net.events[v.index()];
      if (ev.station != depot.station || !ctx.in_dispatch_window(*ev.time)) continue;
      if (shared_platforms.count(ev.platform) != 0) continue;
      Event d;
      d.kind = EventKind::DepotArrival;
      d.station = depot.station;
      d.depot = depot.id;
      d.platform = depot.id;
      d.time = *ev.time + depot.access_time;
      d.train = ev.train;
      d.direction = ev.direction;
      d.max_delay = ctx.delay_cap(*d.time);
      const Seconds d_time = *d.time;
      const EventId did = add_event(std::move(d));
      Activity ret;
      ret.kind = ActivityKind::Return;
      ret.tail = v;
      ret.head = did;
      ret.l_min = depot.access_time;
      ret.penalty = policy.return_penalty;
      add_activity(std::move(ret));
      const Seconds ready = d_time + depot.min_idle;
      for (EventId w : departures) {
        const Event& ew = net.events[w.index()];
        if (ew.station != depot.station || !departure_usable(w)) continue;
        if (*ew.time + ew.max_delay < ready || *ew.time > ready + cycle) continue;
        Activity a;
        a.kind = ActivityKind::DepotReinsert;
        a.tail = did;
        a.head = w;
        a.l_min = depot.min_idle;
        add_activity(std::move(a));
      }
    }
  }

  if (scenario.disruption.active()) {
    for (const auto& depot : topo.depots) {
      if (depot.replacement_capacity <= 0) continue;
      Event r;
      r.kind = EventKind::ReplacementSource;
      r.station = depot.station;
      r.depot = depot.id;
      r.platform = depot.id;
      const EventId rid = add_event(std::move(r));
      for (EventId w : departures) {
        const Event& ew = net.events[w.index()];
        if (ew.station != depot.station || !departure_usable(w)) continue;
        if (*ew.time < scenario.disruption.start || *ew.time >= scenario.recovery_end()) continue;
        Activity a;
        a.kind = ActivityKind::Replacement;
        a.tail = rid;
        a.head = w;
        add_activity(std::move(a));
      }
    }
  }

  net.reindex();
  return net;
}

namespace {

// Transit time assumed for the first train of an opposite-direction pair.
Seconds transit_basis(const Activity& drive, TransitBasis basis) {
  return basis == TransitBasis::Max ? drive.l_max.value_or(drive.l_min) : drive.l_min;
}

}  // namespace

std::vector<TrackConflict> enumerate_track_conflicts(const Network& network, const Scenario& scenario) {
  const Seconds margin = scenario.policy.safety_margin;
  std::set<std::string> shared;
  for (const auto& a : network.activities) {
    if (a.kind == ActivityKind::Drive && a.rerouted && a.selectable) shared.insert(a.track);
  }
  std::vector<TrackConflict> out;
  for (const auto& track : shared) {
    std::vector<const Activity*> drives;
    for (const auto& a : network.activities) {
      if (a.kind == ActivityKind::Drive && a.selectable && a.track == track) drives.push_back(&a);
    }
    std::sort(drives.begin(), drives.end(), [](const Activity* a, const Activity* b) { return a->tail < b->tail; });
    for (std::size_t i = 0; i < drives.size(); ++i) {
      for (std::size_t j = i + 1; j < drives.size(); ++j) {
        const Activity& dv = *drives[i];
        const Activity& dw = *drives[j];
        const Event& v = network.event(dv.tail);
        const Event& w = network.event(dw.tail);
        if (v.id == w.id) continue;
        const bool same = v.direction == w.direction;
        const Seconds l_vw = same ? margin : transit_basis(dv, scenario.policy.opposite_headway) + margin;
        const Seconds l_wv = same ? margin : transit_basis(dw, scenario.policy.opposite_headway) + margin;
        // Orders that hold automatically for every admissible delay need no pair.
        if (*v.time + v.max_delay + l_vw <= *w.time) continue;
        if (*w.time + w.max_delay + l_wv <= *v.time) continue;
        out.push_back(TrackConflict{v.id, w.id, track, l_vw, l_wv, margin, same});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const TrackConflict& a, const TrackConflict& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });
  return out;
}

void add_track_headways(Network& network, const std::vector<TrackConflict>& conflicts) {
  for (const auto& c : conflicts) {
    const auto base = static_cast<std::int32_t>(network.activities.size());
    Activity fwd;
    fwd.id = ActivityId(base);
    fwd.kind = ActivityKind::TrackHeadway;
    fwd.tail = c.first;
    fwd.head = c.second;
    fwd.headway = c.headway_first_second;
    fwd.margin = c.margin;
    fwd.partner = ActivityId(base + 1);
    fwd.track = c.track;
    Activity bwd = fwd;
    bwd.id = ActivityId(base + 1);
    bwd.tail = c.second;
    bwd.head = c.first;
    bwd.headway = c.headway_second_first;
    bwd.partner = ActivityId(base);
    network.activities.push_back(std::move(fwd));
    network.activities.push_back(std::move(bwd));
  }
  network.reindex();
}

std::vector<PlatformConflict> enumerate_station_conflicts(const Network& network, const Scenario& scenario) {
  const Seconds margin = scenario.policy.safety_margin;
  // Platforms entered by rerouted trains.
  std::set<std::string> shared;
  for (const auto& a : network.activities) {
    if (a.kind == ActivityKind::Drive && a.rerouted && a.selectable) {
      const Event& arr = network.event(a.head);
      if (arr.platform != Topology::platform(arr.station, arr.direction)) shared.insert(arr.platform);
    }
  }
  auto successors = [&](EventId v) {
    std::vector<ActivityId> s;
    for (ActivityId a : network.flow_out(v)) {
      const Activity& act = network.activity(a);
      if (act.kind == ActivityKind::Wait || act.kind == ActivityKind::Turn) s.push_back(a);
    }
    return s;
  };
  auto occupied_until = [&](const std::vector<ActivityId>& succ) {
    Seconds end = 0;
    for (ActivityId a : succ) {
      const Event& w = network.event(network.activity(a).head);
      end = std::max(end, *w.time + w.max_delay);
    }
    return end;
  };
  auto arrives_by_usable_drive = [&](EventId v) {
    for (ActivityId a : network.flow_in(v)) {
      const Activity& act = network.activity(a);
      if (act.kind == ActivityKind::Drive && act.selectable) return true;
    }
    return false;
  };

  std::vector<PlatformConflict> out;
  for (const auto& platform : shared) {
    std::vector<EventId> arrivals;
    for (const auto& e : network.events) {
      if (e.kind == EventKind::Arrival && e.platform == platform && arrives_by_usable_drive(e.id)) arrivals.push_back(e.id);
    }
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
      for (std::size_t j = i + 1; j < arrivals.size(); ++j) {
        const Event& v = network.event(arrivals[i]);
        const Event& u = network.event(arrivals[j]);
        if (v.direction == u.direction) continue;
        const auto sv = successors(v.id);
        const auto su = successors(u.id);
        if (sv.empty() || su.empty()) continue;
        if (occupied_until(sv) + margin <= *u.time || occupied_until(su) + margin <= *v.time) continue;
        PlatformConflict c{v.id, u.id, platform, margin, {}};
        for (ActivityId a : sv) {
          for (ActivityId b : su) c.pairs.push_back(CoupledPair{a, b});
        }
        out.push_back(std::move(c));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PlatformConflict& a, const PlatformConflict& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });
  return out;
}

void add_station_headways(Network& network, const std::vector<PlatformConflict>& conflicts) {
  for (const auto& c : conflicts) {
    const auto base = static_cast<std::int32_t>(network.activities.size());
    Activity fwd;
    fwd.id = ActivityId(base);
    fwd.kind = ActivityKind::StationHeadway;
    fwd.tail = c.first;
    fwd.head = c.second;
    fwd.margin = c.margin;
    fwd.partner = ActivityId(base + 1);
    fwd.track = c.platform;
    Activity bwd = fwd;
    bwd.id = ActivityId(base + 1);
    bwd.tail = c.second;
    bwd.head = c.first;
    bwd.partner = ActivityId(base);
    network.activities.push_back(std::move(fwd));
    network.activities.push_back(std::move(bwd));

    StationConflict f{ActivityId(base), c.first, c.second, c.margin, c.pairs};
    StationConflict b{ActivityId(base + 1), c.second, c.first, c.margin, {}};
    for (const auto& p : c.pairs) b.pairs.push_back(CoupledPair{p.other, p.own});
    network.station_conflicts.push_back(std::move(f));
    network.station_conflicts.push_back(std::move(b));
  }
  network.reindex();
}

Network build_network(const Scenario& scenario) {
  Network net = build_base_network(scenario);
  add_track_headways(net, enumerate_track_conflicts(net, scenario));
  add_station_headways(net, enumerate_station_conflicts(net, scenario));
  net.validate();
  return net;
}

std::vector<MarginViolation> validate_safety_margins(const Network& network) {
  std::vector<MarginViolation> out;
  auto slack_in = [&](EventId arrival) {
    Seconds s = 0;
    for (ActivityId a : network.flow_in(arrival)) {
      const Activity& act = network.activity(a);
      if (act.kind == ActivityKind::Drive) s = std::max(s, act.l_max.value_or(act.l_min) - act.l_min);
    }
    return s;
  };
  auto slack_out = [&](EventId departure) {
    if (auto d = network.drive_from(departure)) {
      const Activity& act = network.activity(*d);
      return act.l_max.value_or(act.l_min) - act.l_min;
    }
    return Seconds{0};
  };
  for (const auto& c : network.station_conflicts) {
    const Activity& arc = network.activity(c.arc);
    if (arc.partner.valid() && arc.partner < c.arc) continue;
    Seconds slack = std::max(slack_in(c.arrival), slack_in(c.other_arrival));
    for (const auto& p : c.pairs) {
      slack = std::max(slack, slack_out(network.activity(p.own).head));
      slack = std::max(slack, slack_out(network.activity(p.other).head));
    }
    if (2 * c.margin <= slack) out.push_back(MarginViolation{c.arc, c.margin, slack, slack / 2 + 1});
  }
  return out;
}

}  // namespace railrecover
