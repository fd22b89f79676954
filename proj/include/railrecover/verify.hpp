#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "railrecover/network.hpp"
#include "railrecover/reduce.hpp"
#include "railrecover/solution.hpp"

namespace railrecover {

struct Violation {
  // Row family ("min", "max", "track", "track_pair", "station", "station_pair",
  // "flow", "depot", "depot_out", "supply", "origin") or "domain",
  // "blockage", "recovery".
  std::string check;
  std::vector<std::int32_t> entities;  // activity or event ids
  double slack = 0.0;                  // negative amount by which it fails
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  bool pass = true;
  std::vector<Violation> violations;
  double objective = 0.0;
  std::size_t served = 0;
  std::size_t cancelled = 0;
  std::size_t turns = 0;
  std::size_t returns = 0;
  std::size_t replacements = 0;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

struct VerifyOptions {
  bool extended = false;
  std::size_t max_violations = 1000;
};

// Evaluates every constraint directly on the network with indicators read
// logically, plus the blockage and recovery rules of the scenario.
[[nodiscard]] ValidationReport validate_solution(const Network& network, const Scenario& scenario,
                                                 const Solution& solution, const VerifyOptions& options = {});

[[nodiscard]] double objective_value(const Network& network, const Solution& solution, bool extended = false);

enum class DelayChoice { Least, Greatest };

// Delays for the binary part of `solution` (x is ignored), or nullopt when
// no delay vector satisfies the active timing constraints.
[[nodiscard]] std::optional<std::vector<Seconds>> solve_delays(const Network& network, const Solution& solution,
                                                               DelayChoice choice = DelayChoice::Least);

struct BruteForceOptions {
  std::size_t cap = 20;  // maximum number of free binaries
  bool extended = false;
  const FixedVars* fixed = nullptr;
  // Optional extra filter on binary assignments (applied at leaves).
  std::function<bool(const Solution&)> accept;
};

struct BruteForceResult {
  bool feasible = false;
  Solution solution;
  double objective = 0.0;
  std::uint64_t leaves = 0;
  std::size_t free_binaries = 0;
};

// Number of free binaries the exhaustive search branches over.
[[nodiscard]] std::size_t brute_force_size(const Network& network, const FixedVars* fixed = nullptr);

// Exact optimum by exhaustive search; among equal objectives the assignment
// that is lexicographically smallest in model variable order wins.
[[nodiscard]] BruteForceResult brute_force_optimum(const Network& network, const BruteForceOptions& options = {});

// Calls `visit` for every feasible binary assignment (with delays chosen by
// `choice`); stops early when `visit` returns false. Returns the count.
std::uint64_t enumerate_feasible(const Network& network, const std::function<bool(const Solution&)>& visit,
                                 const BruteForceOptions& options = {}, DelayChoice choice = DelayChoice::Least);

}  // namespace railrecover
