#include "railrecover/pipeline.hpp"

namespace railrecover {

std::size_t unreduced_binaries(const Network& network) { return formulate(network).binary_count(); }

PipelineOptions pipeline_options(const Scenario& scenario) {
  PipelineOptions o;
  o.extended = scenario.solver.extended_objective;
  o.params = SolveParams::from(scenario.solver);
  return o;
}

PipelineResult run_pipeline(const Scenario& scenario, const PipelineOptions& options) {
  PipelineResult out;
  out.network = build_network(scenario);
  out.original_binaries = unreduced_binaries(out.network);
  FormulateOptions fo;
  fo.extended = options.extended;
  fo.name = scenario.name;
  if (options.reduce) {
    out.reduced = reduce(out.network);
    fo.fixed = &out.reduced->fixed;
    out.model = formulate(out.reduced->network, fo);
  } else {
    out.model = formulate(out.network, fo);
  }
  out.result = solve(out.model, options.params, options.control);
  if (out.result.solution) {
    out.solution = options.reduce ? expand_solution(*out.result.solution, out.reduced->map, out.network)
                                  : *out.result.solution;
    VerifyOptions vo;
    vo.extended = options.extended;
    out.report = validate_solution(out.network, scenario, *out.solution, vo);
  } else {
    out.report.pass = false;
  }
  return out;
}

}  // namespace railrecover
