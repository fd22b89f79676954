#pragma once

#include <optional>

#include "railrecover/milp.hpp"
#include "railrecover/network.hpp"
#include "railrecover/reduce.hpp"
#include "railrecover/scenario.hpp"
#include "railrecover/solve.hpp"
#include "railrecover/verify.hpp"

namespace railrecover {

struct PipelineOptions {
  bool reduce = true;
  bool extended = false;
  SolveParams params;
  SolveControl control;
};

struct PipelineResult {
  Network network;
  std::optional<ReducedNetwork> reduced;
  MilpModel model;
  std::size_t original_binaries = 0;  // unfixed binaries of the unreduced model
  SolveResult result;
  std::optional<Solution> solution;  // on the full network
  ValidationReport report;
};

// Unfixed binary count of the model of `network` without any reduction.
[[nodiscard]] std::size_t unreduced_binaries(const Network& network);

// build -> reduce -> formulate -> solve -> expand -> verify.
[[nodiscard]] PipelineResult run_pipeline(const Scenario& scenario, const PipelineOptions& options = {});

// Parameters from the scenario's solver section.
[[nodiscard]] PipelineOptions pipeline_options(const Scenario& scenario);

}  // namespace railrecover
