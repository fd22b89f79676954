#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "railrecover/types.hpp"

namespace railrecover {

// Up runs in increasing station order, Down in decreasing order.
enum class Direction { Up, Down };

[[nodiscard]] Direction opposite(Direction d);
[[nodiscard]] const char* to_string(Direction d);

// One physical track between two adjacent stations. Its id is "<from>><to>"
// where from/to follow the direction of regular traffic.
struct Track {
  std::string id;
  std::string from;
  std::string to;
  Direction direction = Direction::Up;
  Seconds min_run = 0;

  friend bool operator==(const Track&, const Track&) = default;
};

struct Depot {
  std::string id;
  std::string station;
  int replacement_capacity = 0;
  Seconds min_idle = 0;
  // Time from the platform to the depot track.
  Seconds access_time = 60;

  friend bool operator==(const Depot&, const Depot&) = default;
};

// A double-track line. Each pair of adjacent stations carries one Up and one
// Down track; platforms are identified by station and direction.
class Topology {
 public:
  std::vector<std::string> stations;
  std::vector<Track> tracks;
  std::vector<Depot> depots;
  std::vector<std::string> switches;

  // Builds both tracks for every adjacent station pair. `min_runs[i]` is the
  // minimal driving time between stations i and i+1.
  static Topology make_line(std::vector<std::string> stations, const std::vector<Seconds>& min_runs);

  [[nodiscard]] int station_index(const std::string& station) const;  // -1 if unknown
  [[nodiscard]] bool has_station(const std::string& station) const { return station_index(station) >= 0; }
  [[nodiscard]] const Track* find_track(const std::string& id) const;
  [[nodiscard]] const Track& track(const std::string& id) const;
  // Regular track for travelling from `from` to the adjacent station `to`.
  [[nodiscard]] const Track* track_between(const std::string& from, const std::string& to) const;
  // The other track of the same station pair.
  [[nodiscard]] const Track& opposite_track(const Track& t) const;
  [[nodiscard]] bool is_switch(const std::string& station) const;
  [[nodiscard]] const Depot* depot_at(const std::string& station) const;
  [[nodiscard]] static std::string platform(const std::string& station, Direction side);
  // Minimal driving time from the first station, used as the diagram axis.
  [[nodiscard]] std::vector<Seconds> cumulative_positions() const;

  void validate() const;

  friend bool operator==(const Topology&, const Topology&) = default;
};

struct Trip {
  std::string id;
  std::string train;
  std::string line;
  std::string from;
  std::string to;
  std::string track;
  Seconds departure = 0;
  Seconds arrival = 0;

  friend bool operator==(const Trip&, const Trip&) = default;
};

struct Circulation {
  std::string vehicle;
  std::vector<std::string> trips;

  friend bool operator==(const Circulation&, const Circulation&) = default;
};

struct TimeWindow {
  Seconds start = 0;
  Seconds end = 0;

  [[nodiscard]] Seconds length() const { return end - start; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct Timetable {
  std::vector<Trip> trips;
  std::vector<Circulation> circulations;
  Seconds cycle_time = 0;
  TimeWindow horizon;

  [[nodiscard]] const Trip* find_trip(const std::string& id) const;
  void validate(const Topology& topology) const;

  friend bool operator==(const Timetable&, const Timetable&) = default;
};

struct GeneratorParams {
  Seconds cycle_time = 600;
  TimeWindow horizon;
  double buffer_fraction = 0.1;
  Seconds dwell = 20;
  // Minimum layover at each terminal; the generator stretches layovers so the
  // round trip is a whole number of cycles.
  Seconds min_layover = 120;
  // Departure time of the first Up run; later runs follow at cycle intervals.
  Seconds phase = 0;

  friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

// Trains shuttle between the two terminals at the given frequency.
[[nodiscard]] Timetable generate_cyclic_timetable(const Topology& topology, const GeneratorParams& params);
[[nodiscard]] Timetable generate_cyclic_timetable(const Topology& topology, Seconds cycle_time, TimeWindow horizon,
                                                  double buffer_fraction);

struct Disruption {
  std::vector<std::string> tracks;
  Seconds start = 0;
  Seconds end = 0;

  [[nodiscard]] bool active() const { return !tracks.empty() && end > start; }
  friend bool operator==(const Disruption&, const Disruption&) = default;
};

// Basis of the opposite-direction track headway: the transit time of the
// first train plus the safety margin.
enum class TransitBasis { Max, Min };

struct Policy {
  Seconds max_delay = 300;
  // Events later than `disruption.end + recovery` keep their scheduled time.
  Seconds recovery = 3600;
  Seconds safety_margin = 60;
  std::vector<std::string> turn_stations;
  Seconds min_turnaround = 60;
  Seconds min_dwell = 20;
  // Added to the scheduled driving time to obtain L_max. When absent the
  // stretch is twice the trip's buffer.
  std::optional<Seconds> drive_stretch;
  std::map<std::string, Seconds> max_drive_overrides;
  double default_weight = 1.0;
  std::map<std::string, double> weight_overrides;
  double turn_penalty = 0.0;
  double return_penalty = 0.0;
  TransitBasis opposite_headway = TransitBasis::Max;

  [[nodiscard]] double weight(const std::string& trip) const;
  friend bool operator==(const Policy&, const Policy&) = default;
};

enum class NodeSelection { BestBound, BestEstimate, DepthFirst };
enum class BranchingRule { HeadwayFirst, MostFractional };

struct SolverDefaults {
  double time_limit = 60.0;
  std::int64_t node_limit = 0;  // 0 = unlimited
  double gap = 0.0;
  NodeSelection node_selection = NodeSelection::BestBound;
  BranchingRule branching = BranchingRule::HeadwayFirst;
  std::uint64_t seed = 0;
  bool extended_objective = false;

  friend bool operator==(const SolverDefaults&, const SolverDefaults&) = default;
};

struct Scenario {
  std::string name;
  Topology topology;
  Timetable timetable;
  // Set when the timetable was generated rather than listed explicitly.
  std::optional<GeneratorParams> generator;
  Disruption disruption;
  Policy policy;
  SolverDefaults solver;

  // End of the window in which delays and dispatching options are allowed.
  [[nodiscard]] Seconds recovery_end() const { return disruption.end + policy.recovery; }
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace railrecover
