#pragma once

#include <string>
#include <vector>

#include "doctest.h"

#include "railrecover/fixtures.hpp"
#include "railrecover/io.hpp"
#include "railrecover/milp.hpp"
#include "railrecover/network.hpp"
#include "railrecover/reduce.hpp"
#include "railrecover/solve.hpp"
#include "railrecover/pipeline.hpp"
#include "railrecover/verify.hpp"

namespace rrtest {

using namespace railrecover;

inline std::string data_path(const std::string& name) { return std::string(RAILRECOVER_TEST_DATA) + "/" + name; }
inline std::string scenario_path(const std::string& name) {
  return std::string(RAILRECOVER_SCENARIOS) + "/" + name;
}

inline std::vector<ActivityId> of_kind(const Network& n, ActivityKind kind) {
  std::vector<ActivityId> out;
  for (const auto& a : n.activities) {
    if (a.kind == kind) out.push_back(a.id);
  }
  return out;
}

// Model values for an assignment given by the network solution.
inline std::vector<double> values_of(const MilpModel& m, const Solution& s) { return encode(m, s); }

// Seeds of random instances whose free binary count lies in [lo, hi].
inline std::vector<std::uint64_t> seeds_with_binaries(std::size_t count, std::size_t lo, std::size_t hi,
                                                      std::uint64_t first = 1) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t seed = first; out.size() < count && seed < first + 5000; ++seed) {
    const Network n = build_network(fixtures::random_instance(seed));
    const std::size_t b = brute_force_size(n);
    if (b >= lo && b <= hi) out.push_back(seed);
  }
  return out;
}

}  // namespace rrtest
