#pragma once

#include <map>
#include <optional>
#include <vector>

#include "railrecover/network.hpp"
#include "railrecover/solution.hpp"

namespace railrecover {

enum class FixReason {
  SameDirection,  // trains in one direction keep their order
  Window,         // the delay windows admit only one order
  Exclusive,      // neither order fits; the trains cannot both run
};

[[nodiscard]] const char* to_string(FixReason reason);

struct FixedValue {
  int value = 0;
  FixReason reason = FixReason::Window;

  friend bool operator==(const FixedValue&, const FixedValue&) = default;
};

// Forced values of g / h variables, keyed by headway activity. Both members
// of a pair are always present.
struct FixedVars {
  std::map<ActivityId, FixedValue> values;

  [[nodiscard]] std::optional<int> value(ActivityId a) const;
  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] bool empty() const { return values.empty(); }

  friend bool operator==(const FixedVars&, const FixedVars&) = default;
};

[[nodiscard]] FixedVars fix_natural_precedences(const Network& network);

// One contracted drive and the original events it replaces.
struct Chain {
  ActivityId contracted;              // id in the reduced network
  std::vector<EventId> events;        // original ids, departure ... arrival
  std::vector<ActivityId> steps;      // original drives and waits

  friend bool operator==(const Chain&, const Chain&) = default;
};

struct ContractionMap {
  std::vector<Chain> chains;
  // Reduced id -> original id. Contracted drives map to an invalid id.
  std::vector<EventId> event_origin;
  std::vector<ActivityId> activity_origin;

  [[nodiscard]] const Chain* chain_for(ActivityId reduced) const;

  friend bool operator==(const ContractionMap&, const ContractionMap&) = default;
};

struct ReducedNetwork {
  Network network;
  ContractionMap map;
  FixedVars fixed;  // in reduced ids
};

// Replaces maximal drive/wait chains whose interior events carry no other
// arcs by single drives. Chain durations are the exact projection of the
// chain's delay system onto its endpoints.
[[nodiscard]] ReducedNetwork contract_chains(const Network& network, const FixedVars& fixed);
// Fixing followed by contraction.
[[nodiscard]] ReducedNetwork reduce(const Network& network);

// Maps a reduced solution back. Interior delays of a served chain stay
// between the endpoint delays, decreasing as late or increasing as early as
// possible; throws Error if a chain cannot be expanded.
[[nodiscard]] Solution expand_solution(const Solution& reduced, const ContractionMap& map, const Network& original);

// Restriction of an original solution to the reduced network.
[[nodiscard]] Solution restrict_solution(const Solution& original, const ReducedNetwork& reduced);

}  // namespace railrecover
