#include "railrecover/reduce.hpp"

#include <algorithm>
#include <limits>

#include "railrecover/difference.hpp"

namespace railrecover {

const char* to_string(FixReason reason) {
  switch (reason) {
    case FixReason::SameDirection: return "same_direction";
    case FixReason::Window: return "window";
    case FixReason::Exclusive: return "exclusive";
  }
  return "?";
}

std::optional<int> FixedVars::value(ActivityId a) const {
  auto it = values.find(a);
  if (it == values.end()) return std::nullopt;
  return it->second.value;
}

namespace {

Seconds time_of(const Event& e) { return e.time.value_or(0); }

bool earlier(const Event& a, const Event& b) {
  return time_of(a) < time_of(b) || (time_of(a) == time_of(b) && a.id < b.id);
}

}  // namespace

FixedVars fix_natural_precedences(const Network& network) {
  FixedVars fixed;
  auto set_pair = [&](const Activity& a, bool a_first, FixReason reason) {
    fixed.values[a.id] = FixedValue{a_first ? 1 : 0, reason};
    fixed.values[a.partner] = FixedValue{a_first ? 0 : 1, reason};
  };
  for (const auto& a : network.activities) {
    if (!is_headway(a.kind) || !(a.id < a.partner)) continue;
    const Activity& b = network.activity(a.partner);
    const Event& v = network.event(a.tail);
    const Event& w = network.event(a.head);
    bool can_ab = false;
    bool can_ba = false;
    if (a.kind == ActivityKind::TrackHeadway) {
      can_ab = time_of(v) + a.headway <= time_of(w) + w.max_delay;
      can_ba = time_of(w) + b.headway <= time_of(v) + v.max_delay;
      if (v.direction == w.direction) {
        const bool keep = earlier(v, w);
        if (can_ab != can_ba && can_ab != keep) {
          throw Error("precedence between " + v.label() + " and " + w.label() +
                      " contradicts the direction of travel");
        }
        set_pair(a, keep, FixReason::SameDirection);
        continue;
      }
    } else {
      // h = 1 on (v, v'): the successor departure of v precedes arrival v'.
      auto possible = [&](const Activity& arc) {
        const StationConflict* c = network.conflict_for(arc.id);
        if (c == nullptr) return false;
        const Event& other = network.event(c->other_arrival);
        for (const auto& p : c->pairs) {
          const Event& dep = network.event(network.activity(p.own).head);
          if (time_of(dep) + c->margin <= time_of(other) + other.max_delay) return true;
        }
        return false;
      };
      can_ab = possible(a);
      can_ba = possible(b);
    }
    if (can_ab && can_ba) continue;
    if (can_ab != can_ba) {
      set_pair(a, can_ab, FixReason::Window);
    } else {
      set_pair(a, earlier(v, w), FixReason::Exclusive);
    }
  }
  return fixed;
}

const Chain* ContractionMap::chain_for(ActivityId reduced) const {
  for (const auto& c : chains) {
    if (c.contracted == reduced) return &c;
  }
  return nullptr;
}

namespace {

constexpr Seconds kInf = std::numeric_limits<Seconds>::max() / 4;

struct Projection {
  Seconds l_min = 0;
  Seconds l_max = 0;
};

// Shortest-path closure of the chain's difference system over the zero node
// and its events; nullopt if infeasible or if the endpoint bounds tighten.
std::optional<Projection> project_chain(const Network& net, const std::vector<EventId>& events,
                                        const std::vector<ActivityId>& steps) {
  const std::size_t n = events.size() + 1;  // node 0 is the zero node
  std::vector<Seconds> d(n * n, kInf);
  auto at = [&](std::size_t i, std::size_t j) -> Seconds& { return d[i * n + j]; };
  auto edge = [&](std::size_t from, std::size_t to, Seconds w) { at(from, to) = std::min(at(from, to), w); };
  for (std::size_t i = 0; i < n; ++i) at(i, i) = 0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const Event& e = net.event(events[k]);
    edge(0, k + 1, time_of(e) + e.max_delay);  // t_k - z <= pi + cap
    edge(k + 1, 0, -time_of(e));               // z - t_k <= -pi
  }
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const Activity& a = net.activity(steps[k]);
    edge(k + 2, k + 1, -a.l_min);  // t_k - t_{k+1} <= -L_min
    if (a.l_max) edge(k + 1, k + 2, *a.l_max);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (at(i, k) >= kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (at(k, j) >= kInf) continue;
        at(i, j) = std::min(at(i, j), at(i, k) + at(k, j));
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (at(i, i) < 0) return std::nullopt;
  }
  const Event& first = net.event(events.front());
  const Event& last = net.event(events.back());
  const std::size_t m = n - 1;
  if (at(0, 1) != time_of(first) + first.max_delay || at(1, 0) != -time_of(first)) return std::nullopt;
  if (at(0, m) != time_of(last) + last.max_delay || at(m, 0) != -time_of(last)) return std::nullopt;
  return Projection{-at(m, 1), at(1, m)};
}

bool interior_candidate(const Network& net, EventId e) {
  const Event& ev = net.event(e);
  if (ev.kind != EventKind::Departure && ev.kind != EventKind::Arrival) return false;
  if (net.flow_in(e).size() != 1 || net.flow_out(e).size() != 1 || !net.headways_at(e).empty()) return false;
  const Activity& in = net.activity(net.flow_in(e).front());
  const Activity& out = net.activity(net.flow_out(e).front());
  if (ev.kind == EventKind::Arrival) {
    return in.kind == ActivityKind::Drive && out.kind == ActivityKind::Wait;
  }
  return in.kind == ActivityKind::Wait && out.kind == ActivityKind::Drive && out.selectable;
}

// The drive that follows `drive` through an eligible arrival/departure pair.
std::optional<ActivityId> next_drive(const Network& net, const Activity& drive) {
  if (!interior_candidate(net, drive.head)) return std::nullopt;
  const Activity& wait = net.activity(net.flow_out(drive.head).front());
  if (!interior_candidate(net, wait.head)) return std::nullopt;
  return net.flow_out(wait.head).front();
}

struct PendingChain {
  std::vector<ActivityId> drives;
  std::vector<EventId> events;
  std::vector<ActivityId> steps;
  Projection projection;
};

PendingChain make_pending(const Network& net, const std::vector<ActivityId>& drives) {
  PendingChain c;
  c.drives = drives;
  for (std::size_t k = 0; k < drives.size(); ++k) {
    const Activity& d = net.activity(drives[k]);
    if (k == 0) c.events.push_back(d.tail);
    c.steps.push_back(d.id);
    c.events.push_back(d.head);
    if (k + 1 < drives.size()) {
      const ActivityId wait = net.flow_out(d.head).front();
      c.steps.push_back(wait);
      c.events.push_back(net.activity(wait).head);
    }
  }
  return c;
}

}  // namespace

ReducedNetwork contract_chains(const Network& network, const FixedVars& fixed) {
  const Network& net = network;
  // Maximal runs of drives joined through eligible interior events.
  std::vector<std::optional<ActivityId>> next(net.activities.size());
  std::vector<bool> has_prev(net.activities.size(), false);
  for (const auto& a : net.activities) {
    if (a.kind != ActivityKind::Drive || !a.selectable) continue;
    next[a.id.index()] = next_drive(net, a);
    if (next[a.id.index()]) has_prev[next[a.id.index()]->index()] = true;
  }
  std::vector<PendingChain> chains;
  for (const auto& a : net.activities) {
    if (a.kind != ActivityKind::Drive || !a.selectable || has_prev[a.id.index()]) continue;
    std::vector<ActivityId> run{a.id};
    while (auto n = next[run.back().index()]) run.push_back(*n);
    std::size_t i = 0;
    while (i < run.size()) {
      std::optional<PendingChain> best;
      for (std::size_t j = i + 1; j < run.size(); ++j) {
        PendingChain cand =
            make_pending(net, std::vector<ActivityId>(run.begin() + static_cast<std::ptrdiff_t>(i),
                                                      run.begin() + static_cast<std::ptrdiff_t>(j) + 1));
        auto proj = project_chain(net, cand.events, cand.steps);
        if (!proj) break;
        cand.projection = *proj;
        best = std::move(cand);
      }
      if (best) {
        i += best->drives.size();
        chains.push_back(std::move(*best));
      } else {
        ++i;
      }
    }
  }

  ReducedNetwork out;
  Network& r = out.network;
  r.station_conflicts.clear();
  r.depot_capacity = net.depot_capacity;
  r.max_delay = net.max_delay;
  r.disruption = net.disruption;

  std::vector<bool> interior(net.events.size(), false);
  std::vector<int> step_chain(net.activities.size(), -1);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t k = 1; k + 1 < chains[c].events.size(); ++k) interior[chains[c].events[k].index()] = true;
    for (ActivityId s : chains[c].steps) step_chain[s.index()] = static_cast<int>(c);
  }
  std::vector<EventId> new_event(net.events.size());
  for (const auto& e : net.events) {
    if (interior[e.id.index()]) continue;
    Event copy = e;
    copy.id = EventId(static_cast<std::int32_t>(r.events.size()));
    new_event[e.id.index()] = copy.id;
    out.map.event_origin.push_back(e.id);
    r.events.push_back(std::move(copy));
  }
  std::vector<ActivityId> new_activity(net.activities.size());
  for (const auto& a : net.activities) {
    const int c = step_chain[a.id.index()];
    if (c >= 0 && chains[static_cast<std::size_t>(c)].steps.front() != a.id) continue;
    Activity copy = a;
    copy.id = ActivityId(static_cast<std::int32_t>(r.activities.size()));
    if (c >= 0) {
      const PendingChain& pc = chains[static_cast<std::size_t>(c)];
      copy.head = net.activity(pc.steps.back()).head;
      copy.l_min = pc.projection.l_min;
      copy.l_max = pc.projection.l_max;
      copy.cost = 0.0;
      copy.trips.clear();
      copy.rerouted = false;
      for (ActivityId d : pc.drives) {
        const Activity& step = net.activity(d);
        copy.cost += step.cost;
        copy.trips.insert(copy.trips.end(), step.trips.begin(), step.trips.end());
        copy.rerouted = copy.rerouted || step.rerouted;
      }
      out.map.chains.push_back(Chain{copy.id, pc.events, pc.steps});
      out.map.activity_origin.emplace_back();
    } else {
      new_activity[a.id.index()] = copy.id;
      out.map.activity_origin.push_back(a.id);
    }
    copy.tail = new_event[copy.tail.index()];
    copy.head = new_event[copy.head.index()];
    r.activities.push_back(std::move(copy));
  }
  for (auto& a : r.activities) {
    if (a.partner.valid()) a.partner = new_activity[a.partner.index()];
  }
  for (const auto& sc : net.station_conflicts) {
    StationConflict copy{new_activity[sc.arc.index()], new_event[sc.arrival.index()],
                         new_event[sc.other_arrival.index()], sc.margin, {}};
    for (const auto& p : sc.pairs) {
      copy.pairs.push_back(CoupledPair{new_activity[p.own.index()], new_activity[p.other.index()]});
    }
    r.station_conflicts.push_back(std::move(copy));
  }
  for (const auto& [a, v] : fixed.values) out.fixed.values[new_activity[a.index()]] = v;
  r.reindex();
  r.validate();
  return out;
}

ReducedNetwork reduce(const Network& network) { return contract_chains(network, fix_natural_precedences(network)); }

Solution expand_solution(const Solution& reduced, const ContractionMap& map, const Network& original) {
  if (reduced.delay.size() != map.event_origin.size() || reduced.active.size() != map.activity_origin.size()) {
    throw Error("reduced solution does not match the contraction map");
  }
  Solution s = Solution::empty(original);
  for (std::size_t i = 0; i < map.event_origin.size(); ++i) s.delay[map.event_origin[i].index()] = reduced.delay[i];
  for (std::size_t j = 0; j < map.activity_origin.size(); ++j) {
    if (map.activity_origin[j].valid()) s.active[map.activity_origin[j].index()] = reduced.active[j];
  }
  std::vector<EventId> reduced_of(original.events.size());
  for (std::size_t i = 0; i < map.event_origin.size(); ++i) {
    reduced_of[map.event_origin[i].index()] = EventId(static_cast<std::int32_t>(i));
  }
  for (const auto& chain : map.chains) {
    if (reduced.active.at(chain.contracted.index()) == 0) continue;
    for (ActivityId step : chain.steps) s.active[step.index()] = 1;
    // Interior delays move monotonically from x_v to x_w: a decrease happens
    // as late as possible, an increase as early as possible. Both are the
    // greatest schedule with interior delays between the endpoint delays.
    const std::size_t n = chain.events.size();
    const Seconds dv = reduced.delay.at(reduced_of[chain.events.front().index()].index());
    const Seconds dw = reduced.delay.at(reduced_of[chain.events.back().index()].index());
    auto schedule = [&](bool between) {
      DifferenceSystem sys(n);
      for (std::size_t k = 0; k < n; ++k) {
        const Event& e = original.event(chain.events[k]);
        const Seconds pi = time_of(e);
        if (k == 0 || k + 1 == n) {
          const Seconds t = pi + (k == 0 ? dv : dw);
          sys.set_bounds(static_cast<int>(k), t, t);
        } else if (between) {
          sys.set_bounds(static_cast<int>(k), pi + std::min(dv, dw), pi + std::min(e.max_delay, std::max(dv, dw)));
        } else {
          sys.set_bounds(static_cast<int>(k), pi, pi + e.max_delay);
        }
      }
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const Activity& a = original.activity(chain.steps[k]);
        sys.add_at_least(static_cast<int>(k), static_cast<int>(k + 1), a.l_min);
        if (a.l_max) sys.add_at_most(static_cast<int>(k), static_cast<int>(k + 1), *a.l_max);
      }
      return sys.greatest();
    };
    auto times = schedule(true);
    if (!times) times = schedule(false);
    if (!times) throw Error("contracted drive " + std::to_string(chain.contracted.value) + " cannot be expanded");
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const Event& e = original.event(chain.events[k]);
      s.delay[e.id.index()] = (*times)[k] - time_of(e);
    }
  }
  return s;
}

Solution restrict_solution(const Solution& original, const ReducedNetwork& reduced) {
  const ContractionMap& map = reduced.map;
  Solution s = Solution::empty(reduced.network);
  for (std::size_t i = 0; i < map.event_origin.size(); ++i) s.delay[i] = original.delay_of(map.event_origin[i]);
  for (std::size_t j = 0; j < map.activity_origin.size(); ++j) {
    if (map.activity_origin[j].valid()) {
      s.active[j] = original.is_active(map.activity_origin[j]) ? 1 : 0;
    } else if (const Chain* c = map.chain_for(ActivityId(static_cast<std::int32_t>(j)))) {
      s.active[j] = original.is_active(c->steps.front()) ? 1 : 0;
    }
  }
  return s;
}

}  // namespace railrecover
