#include "railrecover/solution.hpp"

#include <algorithm>

namespace railrecover {

Seconds Solution::time_of(const Network& network, EventId v) const {
  return network.event(v).time.value_or(0) + delay_of(v);
}

Solution Solution::empty(const Network& network) {
  Solution s;
  s.active.assign(network.activities.size(), 0);
  s.delay.assign(network.events.size(), 0);
  return s;
}

Solution Solution::original(const Network& network) {
  Solution s = empty(network);
  auto earlier = [&](EventId a, EventId b) {
    const Seconds ta = network.event(a).time.value_or(0);
    const Seconds tb = network.event(b).time.value_or(0);
    return ta < tb || (ta == tb && a < b);
  };
  for (const auto& a : network.activities) {
    bool on = false;
    switch (a.kind) {
      case ActivityKind::Drive: on = a.selectable; break;
      case ActivityKind::Wait:
      case ActivityKind::Start:
      case ActivityKind::Finish: on = true; break;
      case ActivityKind::TrackHeadway:
      case ActivityKind::StationHeadway: on = earlier(a.tail, a.head); break;
      default: break;
    }
    s.active[a.id.index()] = on ? 1 : 0;
  }
  return s;
}

namespace {

bool is_dispatch(ActivityKind kind) {
  return kind == ActivityKind::Turn || kind == ActivityKind::Return || kind == ActivityKind::DepotReinsert ||
         kind == ActivityKind::Replacement;
}

}  // namespace

SolutionDetails describe(const Network& network, const Solution& solution) {
  SolutionDetails d;
  for (const auto& a : network.activities) {
    const bool on = solution.is_active(a.id);
    switch (a.kind) {
      case ActivityKind::Drive:
        for (const auto& t : a.trips) (on ? d.served : d.cancelled).push_back(t);
        break;
      case ActivityKind::Turn:
        if (on) d.turns.push_back(a.id);
        break;
      case ActivityKind::Return:
        if (on) d.returns.push_back(a.id);
        break;
      case ActivityKind::Replacement:
        if (on) ++d.replacements[network.event(a.tail).depot];
        break;
      default: break;
    }
  }

  std::map<std::string, int> replacement_count;
  auto follow = [&](ActivityId first, std::string vehicle, bool modified) {
    ServedPath path;
    path.vehicle = std::move(vehicle);
    path.modified = modified;
    std::vector<bool> seen(network.events.size(), false);
    ActivityId arc = first;
    while (true) {
      const Activity& a = network.activity(arc);
      if (is_dispatch(a.kind)) path.modified = true;
      if (a.kind == ActivityKind::Drive) {
        path.trips.insert(path.trips.end(), a.trips.begin(), a.trips.end());
      }
      const EventId at = a.head;
      if (seen[at.index()]) break;
      seen[at.index()] = true;
      path.events.push_back(at);
      std::optional<ActivityId> next;
      for (ActivityId out : network.flow_out(at)) {
        if (solution.is_active(out)) {
          next = out;
          break;
        }
      }
      if (!next) break;
      arc = *next;
    }
    d.paths.push_back(std::move(path));
  };
  for (const auto& a : network.activities) {
    if (!solution.is_active(a.id)) continue;
    if (a.kind == ActivityKind::Start) {
      follow(a.id, network.event(a.tail).train, false);
    } else if (a.kind == ActivityKind::Replacement) {
      const std::string& depot = network.event(a.tail).depot;
      follow(a.id, depot + "#" + std::to_string(++replacement_count[depot]), true);
    }
  }
  return d;
}

}  // namespace railrecover
