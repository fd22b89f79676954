#pragma once

#include <cstdint>

#include "railrecover/scenario.hpp"

namespace railrecover::fixtures {

// Three stations A-B-C with 300 s minimal runs. Train T1 runs A>B>C and T2
// runs C>B>A, both leaving their terminal at t = 0. The Up tracks are
// blocked, so both trains need the Down track through B. Y = 300,
// S = 60, cycle 300. `turn_at_b` permits turns at B.
[[nodiscard]] Scenario mini_line(bool turn_at_b = false);

// Same shape with a long cycle so every ordering fits the delay window.
// Drives may stretch by `stretch` seconds; opposite-direction track headways
// use the minimal transit time, which is the setting of the alignment lemma.
[[nodiscard]] Scenario fig1(Seconds safety_margin, Seconds stretch = 120);

struct RandomOptions {
  int max_trips = 10;
  int stations_min = 3;
  int stations_max = 4;
};

// Small random line with a one-sided blockage. Deterministic in `seed`.
[[nodiscard]] Scenario random_instance(std::uint64_t seed, const RandomOptions& options = {});

// Synthetic 24-station line shaped like a metro line: 34 min terminal to
// terminal, depots with one reserve each, a blocked 3-segment section in the
// middle with turns allowed at its ends. `blockage` is the blocked interval
// length in seconds.
[[nodiscard]] Scenario u6_like(Seconds cycle, Seconds blockage);

// Copy of `scenario` without a disruption.
[[nodiscard]] Scenario undisturbed(Scenario scenario);

}  // namespace railrecover::fixtures
