#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "railrecover/milp.hpp"
#include "railrecover/scenario.hpp"
#include "railrecover/solution.hpp"

namespace railrecover {

struct SolveParams {
  double time_limit = 60.0;     // seconds, 0 = unlimited
  std::int64_t node_limit = 0;  // 0 = unlimited
  double gap = 0.0;             // relative
  NodeSelection node_selection = NodeSelection::BestBound;
  BranchingRule branching = BranchingRule::HeadwayFirst;
  std::uint64_t seed = 0;
  double estimate_weight = 0.0;  // rho of the best-estimate score
  // Dive for an incumbent at the root and every this many nodes while none
  // is known; 0 disables diving.
  std::int64_t dive_every = 50;

  static SolveParams from(const SolverDefaults& defaults);
};

enum class SolveStatus { Optimal, Feasible, Infeasible, Limit };
[[nodiscard]] const char* to_string(SolveStatus status);

struct Progress {
  std::int64_t nodes = 0;
  std::optional<double> primal;
  double dual_bound = 0.0;
  double gap = 0.0;
  double elapsed = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Limit;
  std::optional<Solution> solution;
  std::vector<double> values;  // model variable values of the incumbent
  double primal = 0.0;
  double dual_bound = 0.0;
  double gap = 0.0;
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
  double wall_time = 0.0;
};

struct SolveControl {
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const Progress&)> on_progress;
  double progress_interval = 0.25;  // seconds between callbacks
};

// Per binary variable: -1 free, otherwise the fixed value.
using PartialAssignment = std::vector<std::int8_t>;

// With every binary of `values` fixed, the timing rows reduce to difference
// constraints. Returns the full value vector with least integer delays, or
// nullopt if the active rows admit no delays.
[[nodiscard]] std::optional<std::vector<double>> check_delay_system(const MilpModel& model,
                                                                    const std::vector<double>& values);

// Linear relaxation value with the assigned binaries fixed; nullopt if the
// relaxation is infeasible.
[[nodiscard]] std::optional<double> lp_bound(const MilpModel& model, const PartialAssignment& partial = {});

// Variable to branch on given relaxation values, or -1 if every free binary
// is integral.
[[nodiscard]] int branch_select(const MilpModel& model, const std::vector<double>& relaxation,
                                const PartialAssignment& partial, BranchingRule rule);

[[nodiscard]] SolveResult solve(const MilpModel& model, const SolveParams& params = {},
                                const SolveControl& control = {});

}  // namespace railrecover
