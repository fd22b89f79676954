#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "railrecover/scenario.hpp"
#include "railrecover/types.hpp"

namespace railrecover {

enum class EventKind {
  Departure,
  Arrival,
  DepotArrival,
  ReplacementSource,
  // Position of a vehicle when the observed window opens.
  Origin,
  // End of the observed window; absorbs any train.
  Sink,
};

enum class ActivityKind {
  Drive,
  Wait,
  Turn,
  Return,
  DepotReinsert,
  Replacement,  // ReplacementSource -> first departure
  Start,        // Origin -> first departure
  Finish,       // last arrival -> Sink
  TrackHeadway,
  StationHeadway,
};

[[nodiscard]] const char* to_string(EventKind kind);
[[nodiscard]] const char* to_string(ActivityKind kind);

// Activities carrying train flow (variable y).
[[nodiscard]] bool is_flow(ActivityKind kind);
// Drive, Wait, Turn.
[[nodiscard]] bool is_train(ActivityKind kind);
[[nodiscard]] bool is_headway(ActivityKind kind);

struct Event {
  EventId id;
  EventKind kind = EventKind::Departure;
  std::string station;
  std::string depot;
  std::string platform;
  std::optional<Seconds> time;
  std::string trip;
  std::string train;
  Direction direction = Direction::Up;
  // Upper bound of the delay x_v; 0 freezes the event at its scheduled time.
  Seconds max_delay = 0;

  [[nodiscard]] std::string label() const;
  friend bool operator==(const Event&, const Event&) = default;
};

struct Activity {
  ActivityId id;
  ActivityKind kind = ActivityKind::Drive;
  EventId tail;
  EventId head;
  Seconds l_min = 0;
  std::optional<Seconds> l_max;  // Drive only
  Seconds headway = 0;           // L_vw, headway kinds only
  Seconds margin = 0;            // S, headway kinds only
  double cost = 0.0;             // c_a, Drive only
  double penalty = 0.0;          // c_b, Turn and Return only
  // False for drives that can never run (blocked without reroute).
  bool selectable = true;
  // Track headways: the reversed activity of the disjunctive pair.
  ActivityId partner;
  // Trips covered by a drive; more than one after contraction.
  std::vector<std::string> trips;
  std::string track;
  bool rerouted = false;

  friend bool operator==(const Activity&, const Activity&) = default;
};

struct CoupledPair {
  ActivityId own;    // (v, w)
  ActivityId other;  // (v', w')

  friend bool operator==(const CoupledPair&, const CoupledPair&) = default;
};

// Station headway (v, v'): if both coupled activities run and h_vv' = 1,
// departure w precedes arrival v' by at least the margin.
struct StationConflict {
  ActivityId arc;
  EventId arrival;
  EventId other_arrival;
  Seconds margin = 0;
  std::vector<CoupledPair> pairs;

  friend bool operator==(const StationConflict&, const StationConflict&) = default;
};

class Network {
 public:
  std::vector<Event> events;
  std::vector<Activity> activities;
  std::vector<StationConflict> station_conflicts;
  std::map<std::string, int> depot_capacity;
  Seconds max_delay = 0;
  std::optional<Disruption> disruption;

  [[nodiscard]] const Event& event(EventId id) const { return events.at(id.index()); }
  [[nodiscard]] const Activity& activity(ActivityId id) const { return activities.at(id.index()); }

  // Flow activities entering / leaving an event, in id order.
  [[nodiscard]] const std::vector<ActivityId>& flow_in(EventId id) const;
  [[nodiscard]] const std::vector<ActivityId>& flow_out(EventId id) const;
  [[nodiscard]] const std::vector<ActivityId>& headways_at(EventId id) const;
  // The drive leaving a departure event, if any.
  [[nodiscard]] std::optional<ActivityId> drive_from(EventId departure) const;
  [[nodiscard]] const StationConflict* conflict_for(ActivityId station_arc) const;

  [[nodiscard]] std::size_t trip_count() const;
  [[nodiscard]] std::size_t count(ActivityKind kind) const;
  [[nodiscard]] std::size_t count(EventKind kind) const;

  // Recomputes adjacency after events/activities were edited.
  void reindex();
  // Checks structural invariants; throws ValidationError.
  void validate() const;

  friend bool operator==(const Network& a, const Network& b) {
    return a.events == b.events && a.activities == b.activities && a.station_conflicts == b.station_conflicts &&
           a.depot_capacity == b.depot_capacity && a.max_delay == b.max_delay && a.disruption == b.disruption;
  }

 private:
  std::vector<std::vector<ActivityId>> in_;
  std::vector<std::vector<ActivityId>> out_;
  std::vector<std::vector<ActivityId>> headways_;
  std::map<std::int32_t, std::size_t> conflict_index_;
};

// Builds the event-activity network without headway activities.
[[nodiscard]] Network build_base_network(const Scenario& scenario);

struct TrackConflict {
  EventId first;
  EventId second;
  std::string track;
  Seconds headway_first_second = 0;  // L_vw
  Seconds headway_second_first = 0;  // L_wv
  Seconds margin = 0;
  bool same_direction = false;

  friend bool operator==(const TrackConflict&, const TrackConflict&) = default;
};

// Departure pairs sharing a track resource whose delay windows may interact.
[[nodiscard]] std::vector<TrackConflict> enumerate_track_conflicts(const Network& network, const Scenario& scenario);
// Adds both directed TrackHeadway activities for every conflict.
void add_track_headways(Network& network, const std::vector<TrackConflict>& conflicts);

struct PlatformConflict {
  EventId first;
  EventId second;
  std::string platform;
  Seconds margin = 0;
  std::vector<CoupledPair> pairs;  // first's successor, second's successor

  friend bool operator==(const PlatformConflict&, const PlatformConflict&) = default;
};

[[nodiscard]] std::vector<PlatformConflict> enumerate_station_conflicts(const Network& network,
                                                                        const Scenario& scenario);
void add_station_headways(Network& network, const std::vector<PlatformConflict>& conflicts);

// Full construction: base network plus track and station headways.
[[nodiscard]] Network build_network(const Scenario& scenario);

struct MarginViolation {
  ActivityId arc;
  Seconds margin = 0;
  Seconds max_slack = 0;  // max(L_max - L_min) of adjoining drives
  // The margin must exceed max_slack / 2; smallest integer that does.
  Seconds required = 0;

  friend bool operator==(const MarginViolation&, const MarginViolation&) = default;
};

// Margins of opposite-direction station conflicts that are too small for the
// station headway to transmit the track priority.
[[nodiscard]] std::vector<MarginViolation> validate_safety_margins(const Network& network);

}  // namespace railrecover
