#include "railrecover/verify.hpp"

#include <algorithm>
#include <set>

#include "railrecover/difference.hpp"

namespace railrecover {

double objective_value(const Network& network, const Solution& solution, bool extended) {
  double value = 0.0;
  for (const auto& a : network.activities) {
    if (!solution.is_active(a.id)) continue;
    if (a.kind == ActivityKind::Drive) value += a.cost;
    if (extended && (a.kind == ActivityKind::Turn || a.kind == ActivityKind::Return)) value -= a.penalty;
  }
  return value;
}

namespace {

bool any_active(const Solution& s, const std::vector<ActivityId>& arcs) {
  return std::any_of(arcs.begin(), arcs.end(), [&](ActivityId a) { return s.is_active(a); });
}

int flow_sum(const Solution& s, const std::vector<ActivityId>& arcs) {
  int n = 0;
  for (ActivityId a : arcs) n += s.is_active(a) ? 1 : 0;
  return n;
}

// Timed events get consecutive indices in the delay system.
std::vector<int> timed_index(const Network& net) {
  std::vector<int> idx(net.events.size(), -1);
  int k = 0;
  for (const auto& e : net.events) {
    if (e.time) idx[e.id.index()] = k++;
  }
  return idx;
}

DifferenceSystem base_system(const Network& net, const std::vector<int>& idx) {
  const auto n = static_cast<std::size_t>(std::count_if(idx.begin(), idx.end(), [](int i) { return i >= 0; }));
  DifferenceSystem sys(n);
  for (const auto& e : net.events) {
    if (!e.time) continue;
    sys.set_bounds(idx[e.id.index()], *e.time, *e.time + e.max_delay);
  }
  return sys;
}

void add_flow_timing(const Network& net, const Solution& s, const std::vector<int>& idx, DifferenceSystem& sys) {
  for (const auto& a : net.activities) {
    if (!is_flow(a.kind) || !s.is_active(a.id)) continue;
    const int v = idx[a.tail.index()];
    const int w = idx[a.head.index()];
    if (v < 0 || w < 0) continue;
    sys.add_at_least(v, w, a.l_min);
    if (a.kind == ActivityKind::Drive && a.l_max) sys.add_at_most(v, w, *a.l_max);
  }
}

bool track_relevant(const Network& net, const Solution& s, const Activity& a) {
  return any_active(s, net.flow_out(a.tail)) && any_active(s, net.flow_out(a.head));
}

// Adds the constraints implied by headway activity `a` being selected.
void add_headway_timing(const Network& net, const Solution& s, const std::vector<int>& idx, const Activity& a,
                        DifferenceSystem& sys) {
  if (a.kind == ActivityKind::TrackHeadway) {
    if (track_relevant(net, s, a)) sys.add_at_least(idx[a.tail.index()], idx[a.head.index()], a.headway);
    return;
  }
  const StationConflict* c = net.conflict_for(a.id);
  if (c == nullptr) return;
  for (const auto& p : c->pairs) {
    if (!s.is_active(p.own) || !s.is_active(p.other)) continue;
    const EventId w = net.activity(p.own).head;
    sys.add_at_least(idx[w.index()], idx[c->other_arrival.index()], c->margin);
  }
}

bool station_relevant(const Network& net, const Solution& s, const Activity& a) {
  for (ActivityId arc : {a.id, a.partner}) {
    const StationConflict* c = net.conflict_for(arc);
    if (c == nullptr) continue;
    for (const auto& p : c->pairs) {
      if (s.is_active(p.own) && s.is_active(p.other)) return true;
    }
  }
  return false;
}

std::vector<Seconds> to_delays(const Network& net, const std::vector<int>& idx, const std::vector<Seconds>& t) {
  std::vector<Seconds> d(net.events.size(), 0);
  for (const auto& e : net.events) {
    if (e.time) d[e.id.index()] = t[static_cast<std::size_t>(idx[e.id.index()])] - *e.time;
  }
  return d;
}

}  // namespace

std::optional<std::vector<Seconds>> solve_delays(const Network& network, const Solution& solution,
                                                 DelayChoice choice) {
  const auto idx = timed_index(network);
  DifferenceSystem sys = base_system(network, idx);
  add_flow_timing(network, solution, idx, sys);
  for (const auto& a : network.activities) {
    if (is_headway(a.kind) && solution.is_active(a.id)) add_headway_timing(network, solution, idx, a, sys);
  }
  auto t = choice == DelayChoice::Least ? sys.least() : sys.greatest();
  if (!t) return std::nullopt;
  return to_delays(network, idx, *t);
}

ValidationReport validate_solution(const Network& network, const Scenario& scenario, const Solution& solution,
                                   const VerifyOptions& options) {
  if (solution.active.size() != network.activities.size() || solution.delay.size() != network.events.size()) {
    throw Error("solution does not match the network (" + std::to_string(solution.active.size()) + " activities, " +
                std::to_string(solution.delay.size()) + " events)");
  }
  ValidationReport rep;
  auto fail = [&](std::string check, std::vector<std::int32_t> ids, double slack, std::string msg) {
    if (rep.violations.size() < options.max_violations) {
      rep.violations.push_back(Violation{std::move(check), std::move(ids), slack, std::move(msg)});
    }
    rep.pass = false;
  };
  auto t = [&](EventId e) { return solution.time_of(network, e); };

  for (const auto& a : network.activities) {
    const auto v = solution.active[a.id.index()];
    if (v > 1) fail("domain", {a.id.value}, 0, "binary value out of range");
    if (a.kind == ActivityKind::Drive && !a.selectable && v != 0) {
      fail("domain", {a.id.value}, -1, "drive on a blocked track without reroute");
    }
  }
  for (const auto& e : network.events) {
    const Seconds x = solution.delay[e.id.index()];
    if (!e.time) {
      if (x != 0) fail("domain", {e.id.value}, static_cast<double>(-std::abs(x)), "unscheduled event with delay");
      continue;
    }
    const bool frozen_by_recovery = network.disruption && *e.time >= scenario.recovery_end();
    if (x < 0) fail("domain", {e.id.value}, static_cast<double>(x), "negative delay");
    if (x > e.max_delay) {
      fail(frozen_by_recovery ? "recovery" : "domain", {e.id.value}, static_cast<double>(e.max_delay - x),
           "delay above bound at " + e.label());
    }
  }

  for (const auto& a : network.activities) {
    if (!is_flow(a.kind) || !solution.is_active(a.id)) continue;
    const Event& v = network.event(a.tail);
    const Event& w = network.event(a.head);
    if (!v.time || !w.time) continue;
    const Seconds gap = t(a.head) - t(a.tail);
    if (gap < a.l_min) fail("min", {a.id.value}, static_cast<double>(gap - a.l_min), "activity shorter than L_min");
    if (a.kind == ActivityKind::Drive && a.l_max && gap > *a.l_max) {
      fail("max", {a.id.value}, static_cast<double>(*a.l_max - gap), "drive longer than L_max");
    }
  }

  for (const auto& a : network.activities) {
    if (a.kind == ActivityKind::TrackHeadway) {
      if (a.id < a.partner && solution.active[a.id.index()] + solution.active[a.partner.index()] != 1) {
        fail("track_pair", {a.id.value, a.partner.value}, -1, "exactly one order must be chosen");
      }
      if (solution.is_active(a.id) && track_relevant(network, solution, a)) {
        const Seconds gap = t(a.head) - t(a.tail);
        if (gap < a.headway) {
          fail("track", {a.id.value}, static_cast<double>(gap - a.headway), "track headway violated");
        }
      }
    } else if (a.kind == ActivityKind::StationHeadway) {
      if (a.id < a.partner && solution.active[a.id.index()] + solution.active[a.partner.index()] != 1) {
        fail("station_pair", {a.id.value, a.partner.value}, -1, "exactly one order must be chosen");
      }
      const StationConflict* c = network.conflict_for(a.id);
      if (!solution.is_active(a.id) || c == nullptr) continue;
      for (const auto& p : c->pairs) {
        if (!solution.is_active(p.own) || !solution.is_active(p.other)) continue;
        const EventId w = network.activity(p.own).head;
        const Seconds gap = t(c->other_arrival) - t(w);
        if (gap < c->margin) {
          fail("station", {a.id.value, p.own.value, p.other.value}, static_cast<double>(gap - c->margin),
               "platform not cleared before the opposing arrival");
        }
      }
    }
  }

  for (const auto& e : network.events) {
    const int in = flow_sum(solution, network.flow_in(e.id));
    const int out = flow_sum(solution, network.flow_out(e.id));
    switch (e.kind) {
      case EventKind::Departure:
      case EventKind::Arrival:
        if (in != out) fail("flow", {e.id.value}, -std::abs(in - out), "flow not conserved at " + e.label());
        break;
      case EventKind::DepotArrival:
        if (in - out > 1) fail("depot", {e.id.value}, 1 - (in - out), "depot absorbs more than one train");
        if (out > in) fail("depot_out", {e.id.value}, in - out, "depot releases a train it never received");
        break;
      case EventKind::ReplacementSource: {
        auto it = network.depot_capacity.find(e.depot);
        const int cap = it == network.depot_capacity.end() ? 0 : it->second;
        if (out > cap) fail("supply", {e.id.value}, cap - out, "replacement capacity exceeded at " + e.depot);
        break;
      }
      case EventKind::Origin:
        if (out > 1) fail("origin", {e.id.value}, 1 - out, "vehicle used twice");
        break;
      case EventKind::Sink: break;
    }
  }

  if (network.disruption) {
    const Disruption& d = *network.disruption;
    const std::set<std::string> blocked(d.tracks.begin(), d.tracks.end());
    for (const auto& a : network.activities) {
      if (a.kind != ActivityKind::Drive || !solution.is_active(a.id) || blocked.count(a.track) == 0) continue;
      const Seconds enter = t(a.tail);
      if (enter >= d.start && enter < d.end) {
        fail("blockage", {a.id.value}, static_cast<double>(enter - d.end), "trip enters " + a.track + " while blocked");
      }
    }
  }

  const SolutionDetails details = describe(network, solution);
  rep.objective = objective_value(network, solution, options.extended);
  rep.served = details.served.size();
  rep.cancelled = details.cancelled.size();
  rep.turns = details.turns.size();
  rep.returns = details.returns.size();
  for (const auto& [depot, n] : details.replacements) rep.replacements += static_cast<std::size_t>(n);
  return rep;
}

// ---------------------------------------------------------------------------
// Exhaustive search

namespace {

struct Search {
  const Network& net;
  const BruteForceOptions& opt;
  std::vector<int> idx;
  std::vector<ActivityId> flow;              // branching order for y
  std::vector<std::uint8_t> flow_fixed;      // 0 free, 1 fixed to 0
  std::vector<std::vector<EventId>> checks;  // events completed at flow position k
  std::vector<double> potential;             // best possible gain from positions >= k
  std::vector<ActivityId> pairs;             // lower id member of each headway pair
  std::vector<int> pair_fixed;               // -1 free, else value of the lower member
  Solution cur;
  double value = 0.0;
  std::uint64_t leaves = 0;

  Search(const Network& n, const BruteForceOptions& o) : net(n), opt(o), idx(timed_index(n)) {
    std::vector<int> pos(net.activities.size(), -1);
    for (const auto& a : net.activities) {
      if (!is_flow(a.kind)) continue;
      pos[a.id.index()] = static_cast<int>(flow.size());
      flow.push_back(a.id);
      flow_fixed.push_back(a.kind == ActivityKind::Drive && !a.selectable ? 1 : 0);
    }
    checks.resize(flow.size() + 1);
    for (const auto& e : net.events) {
      int last = -1;
      for (ActivityId a : net.flow_in(e.id)) last = std::max(last, pos[a.index()]);
      for (ActivityId a : net.flow_out(e.id)) last = std::max(last, pos[a.index()]);
      if (last >= 0) checks[static_cast<std::size_t>(last)].push_back(e.id);
    }
    potential.assign(flow.size() + 1, 0.0);
    for (std::size_t k = flow.size(); k-- > 0;) {
      potential[k] = potential[k + 1] + (flow_fixed[k] ? 0.0 : std::max(0.0, gain(flow[k])));
    }
    for (const auto& a : net.activities) {
      if (!is_headway(a.kind) || !(a.id < a.partner)) continue;
      pairs.push_back(a.id);
      int fixed = -1;
      if (opt.fixed != nullptr) {
        if (auto f = opt.fixed->value(a.id)) fixed = *f;
      }
      pair_fixed.push_back(fixed);
    }
    cur = Solution::empty(net);
  }

  [[nodiscard]] double gain(ActivityId id) const {
    const Activity& a = net.activity(id);
    if (a.kind == ActivityKind::Drive) return a.cost;
    if (opt.extended && (a.kind == ActivityKind::Turn || a.kind == ActivityKind::Return)) return -a.penalty;
    return 0.0;
  }

  [[nodiscard]] std::size_t free_binaries() const {
    std::size_t n = 0;
    for (auto f : flow_fixed) n += f ? 0 : 1;
    for (int f : pair_fixed) n += f < 0 ? 1 : 0;
    return n;
  }

  [[nodiscard]] bool event_ok(EventId id) const {
    const Event& e = net.event(id);
    const int in = flow_sum(cur, net.flow_in(id));
    const int out = flow_sum(cur, net.flow_out(id));
    switch (e.kind) {
      case EventKind::Departure:
      case EventKind::Arrival: return in == out;
      case EventKind::DepotArrival: return in - out <= 1 && out <= in;
      case EventKind::ReplacementSource: {
        auto it = net.depot_capacity.find(e.depot);
        return out <= (it == net.depot_capacity.end() ? 0 : it->second);
      }
      case EventKind::Origin: return out <= 1;
      case EventKind::Sink: return true;
    }
    return true;
  }

  void set_pair(std::size_t p, int bit) {
    const Activity& a = net.activity(pairs[p]);
    cur.active[a.id.index()] = static_cast<std::uint8_t>(bit);
    cur.active[a.partner.index()] = static_cast<std::uint8_t>(1 - bit);
  }

  [[nodiscard]] bool pair_relevant(std::size_t p) const {
    const Activity& a = net.activity(pairs[p]);
    return a.kind == ActivityKind::TrackHeadway ? track_relevant(net, cur, a) : station_relevant(net, cur, a);
  }

  // Delay feasibility with pairs [0, upto) decided.
  [[nodiscard]] std::optional<std::vector<Seconds>> timing(std::size_t upto, DelayChoice choice) const {
    DifferenceSystem sys = base_system(net, idx);
    add_flow_timing(net, cur, idx, sys);
    for (std::size_t p = 0; p < upto; ++p) {
      const Activity& a = net.activity(pairs[p]);
      const Activity& chosen = cur.is_active(a.id) ? a : net.activity(a.partner);
      add_headway_timing(net, cur, idx, chosen, sys);
    }
    return choice == DelayChoice::Least ? sys.least() : sys.greatest();
  }

  // Optimization: first feasible pair completion in lexicographic order.
  bool complete_pairs(std::size_t p) {
    if (!timing(p, DelayChoice::Least)) return false;
    if (p == pairs.size()) {
      ++leaves;
      return !opt.accept || opt.accept(cur);
    }
    if (pair_fixed[p] >= 0) {
      set_pair(p, pair_fixed[p]);
      return complete_pairs(p + 1);
    }
    if (!pair_relevant(p)) {
      set_pair(p, 0);
      return complete_pairs(p + 1);
    }
    for (int bit : {0, 1}) {
      set_pair(p, bit);
      if (complete_pairs(p + 1)) return true;
    }
    return false;
  }

  BruteForceResult best;

  void optimize(std::size_t k) {
    if (best.feasible && value + potential[k] <= best.objective + 1e-9) return;
    if (k == flow.size()) {
      if (complete_pairs(0)) {
        best.feasible = true;
        best.objective = value;
        best.solution = cur;
        auto t = timing(pairs.size(), DelayChoice::Least);
        best.solution.delay = to_delays(net, idx, *t);
      }
      return;
    }
    const ActivityId a = flow[k];
    for (std::uint8_t bit : {std::uint8_t{0}, std::uint8_t{1}}) {
      if (bit == 1 && flow_fixed[k]) break;
      cur.active[a.index()] = bit;
      const double g = bit ? gain(a) : 0.0;
      bool ok = true;
      for (EventId e : checks[k]) {
        if (!event_ok(e)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        value += g;
        optimize(k + 1);
        value -= g;
      }
    }
    cur.active[a.index()] = 0;
  }

  // Enumeration of every feasible assignment.
  bool enumerate_pairs(std::size_t p, const std::function<bool(const Solution&)>& visit, DelayChoice choice,
                       std::uint64_t& count) {
    if (p == pairs.size()) {
      auto t = timing(p, choice);
      if (!t) return true;
      if (opt.accept && !opt.accept(cur)) return true;
      ++count;
      Solution s = cur;
      s.delay = to_delays(net, idx, *t);
      return visit(s);
    }
    if (!timing(p, DelayChoice::Least)) return true;
    for (int bit : {0, 1}) {
      if (pair_fixed[p] >= 0 && bit != pair_fixed[p]) continue;
      set_pair(p, bit);
      if (!enumerate_pairs(p + 1, visit, choice, count)) return false;
    }
    return true;
  }

  bool enumerate_flow(std::size_t k, const std::function<bool(const Solution&)>& visit, DelayChoice choice,
                      std::uint64_t& count) {
    if (k == flow.size()) return enumerate_pairs(0, visit, choice, count);
    const ActivityId a = flow[k];
    for (std::uint8_t bit : {std::uint8_t{0}, std::uint8_t{1}}) {
      if (bit == 1 && flow_fixed[k]) break;
      cur.active[a.index()] = bit;
      bool ok = true;
      for (EventId e : checks[k]) ok = ok && event_ok(e);
      if (ok && !enumerate_flow(k + 1, visit, choice, count)) {
        cur.active[a.index()] = 0;
        return false;
      }
    }
    cur.active[a.index()] = 0;
    return true;
  }
};

void check_cap(const Search& s, const BruteForceOptions& options) {
  const std::size_t n = s.free_binaries();
  if (n > options.cap) {
    throw Error("exhaustive search over " + std::to_string(n) + " binaries exceeds the cap of " +
                std::to_string(options.cap));
  }
}

}  // namespace

std::size_t brute_force_size(const Network& network, const FixedVars* fixed) {
  BruteForceOptions o;
  o.fixed = fixed;
  return Search(network, o).free_binaries();
}

BruteForceResult brute_force_optimum(const Network& network, const BruteForceOptions& options) {
  Search s(network, options);
  check_cap(s, options);
  s.optimize(0);
  s.best.leaves = s.leaves;
  s.best.free_binaries = s.free_binaries();
  if (!s.best.feasible) s.best.solution = Solution::empty(network);
  return s.best;
}

std::uint64_t enumerate_feasible(const Network& network, const std::function<bool(const Solution&)>& visit,
                                 const BruteForceOptions& options, DelayChoice choice) {
  Search s(network, options);
  check_cap(s, options);
  std::uint64_t count = 0;
  s.enumerate_flow(0, visit, choice, count);
  return count;
}

}  // namespace railrecover
