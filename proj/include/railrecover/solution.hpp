#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "railrecover/network.hpp"

namespace railrecover {

// An assignment for a network. `active[a]` is y_a for flow activities and
// g_a / h_a for headway activities; `delay[v]` is x_v.
struct Solution {
  std::vector<std::uint8_t> active;
  std::vector<Seconds> delay;

  [[nodiscard]] bool is_active(ActivityId a) const { return a.index() < active.size() && active[a.index()] != 0; }
  [[nodiscard]] Seconds delay_of(EventId v) const { return v.index() < delay.size() ? delay[v.index()] : 0; }
  // Realized time pi + x; events without a schedule report their delay.
  [[nodiscard]] Seconds time_of(const Network& network, EventId v) const;

  // All zero: no trip served, no delay.
  static Solution empty(const Network& network);
  // Every planned trip on time; headway orders follow the timetable.
  static Solution original(const Network& network);

  friend bool operator==(const Solution&, const Solution&) = default;
};

// One vehicle path through the selected flow activities.
struct ServedPath {
  std::string vehicle;  // train id, or "<depot>#<n>" for replacement trains
  std::vector<std::string> trips;
  std::vector<EventId> events;
  bool modified = false;

  friend bool operator==(const ServedPath&, const ServedPath&) = default;
};

struct SolutionDetails {
  std::vector<std::string> served;
  std::vector<std::string> cancelled;
  std::vector<ActivityId> turns;
  std::vector<ActivityId> returns;
  std::map<std::string, int> replacements;  // per depot
  std::vector<ServedPath> paths;

  friend bool operator==(const SolutionDetails&, const SolutionDetails&) = default;
};

[[nodiscard]] SolutionDetails describe(const Network& network, const Solution& solution);

}  // namespace railrecover
