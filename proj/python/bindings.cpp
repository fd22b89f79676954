#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "railrecover/fixtures.hpp"
#include "railrecover/io.hpp"
#include "railrecover/milp.hpp"
#include "railrecover/pipeline.hpp"

namespace py = pybind11;
using namespace railrecover;

namespace {

std::string solve_text(const std::string& scenario_text, std::optional<double> time_limit, bool reduce,
                       std::optional<bool> extended) {
  Scenario s = parse_scenario_text(scenario_text);
  if (time_limit) s.solver.time_limit = *time_limit;
  if (extended) s.solver.extended_objective = *extended;
  PipelineOptions o = pipeline_options(s);
  o.reduce = reduce;
  PipelineResult r;
  {
    py::gil_scoped_release release;
    r = run_pipeline(s, o);
  }
  if (!r.solution) throw Error(std::string("no solution found (") + to_string(r.result.status) + ")");
  SolutionDocument doc{scenario_hash(s), s.name, *r.solution, r.report, SolveSummary::from(r.result, r.model)};
  return write_solution(doc, r.network);
}

std::string verify_text(const std::string& scenario_text, const std::string& solution_text) {
  const Scenario s = parse_scenario_text(scenario_text);
  const Network n = build_network(s);
  const SolutionDocument doc = read_solution_text(solution_text);
  VerifyOptions vo;
  vo.extended = s.solver.extended_objective;
  return report_to_json(validate_solution(n, s, doc.solution, vo)).dump();
}

std::string summary_text(const std::string& scenario_text, const std::string& solution_text) {
  const Scenario s = parse_scenario_text(scenario_text);
  return solution_summary(read_solution_text(solution_text), build_network(s)).dump();
}

std::string diagram_text(const std::string& scenario_text, const std::string& solution_text) {
  const Scenario s = parse_scenario_text(scenario_text);
  return render_time_space_diagram(s, build_network(s), read_solution_text(solution_text).solution);
}

std::string export_lp_text(const std::string& scenario_text, bool reduce) {
  const Scenario s = parse_scenario_text(scenario_text);
  const Network n = build_network(s);
  FormulateOptions fo;
  fo.extended = s.solver.extended_objective;
  fo.name = s.name;
  if (!reduce) return export_model(formulate(n, fo));
  const ReducedNetwork r = railrecover::reduce(n);
  fo.fixed = &r.fixed;
  return export_model(formulate(r.network, fo));
}

std::string stats_text(const std::string& scenario_text) {
  const Scenario s = parse_scenario_text(scenario_text);
  const Network n = build_network(s);
  const ReducedNetwork r = railrecover::reduce(n);
  FormulateOptions fo;
  fo.fixed = &r.fixed;
  const MilpModel m = formulate(r.network, fo);
  return Json{{"events", n.events.size()},
              {"activities", n.activities.size()},
              {"trips", n.trip_count()},
              {"binaries_before", unreduced_binaries(n)},
              {"binaries_after", m.binary_count()},
              {"integers_after", m.integer_count()}}
      .dump();
}

std::string fixture_text(const std::string& name, py::kwargs kw) {
  auto get = [&](const char* key, Seconds fallback) {
    return kw.contains(key) ? kw[key].cast<Seconds>() : fallback;
  };
  if (name == "mini_line") return write_scenario(fixtures::mini_line(kw.contains("turn") && kw["turn"].cast<bool>()));
  if (name == "fig1") return write_scenario(fixtures::fig1(get("margin", 61), get("stretch", 120)));
  if (name == "u6_like") return write_scenario(fixtures::u6_like(get("cycle", 600), get("blockage", 300)));
  if (name == "random") return write_scenario(fixtures::random_instance(static_cast<std::uint64_t>(get("seed", 1))));
  throw py::value_error("unknown fixture '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_railrecover, m) {
  m.doc() = "Rail disruption recovery: JSON text in, JSON/SVG text out.";
  m.attr("schema_version") = kSchemaVersion;

  static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      PyErr_SetObject(validation_error.ptr(), py::make_tuple(e.what(), e.path()).ptr());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  m.def("canonical_scenario", [](const std::string& text) { return write_scenario(parse_scenario_text(text)); },
        py::arg("scenario"), "Parse, validate and re-serialize a scenario with defaults echoed.");
  m.def("scenario_hash", [](const std::string& text) { return scenario_hash(parse_scenario_text(text)); },
        py::arg("scenario"));
  m.def("solve", &solve_text, py::arg("scenario"), py::arg("time_limit") = py::none(), py::arg("reduce") = true,
        py::arg("extended") = py::none());
  m.def("verify", &verify_text, py::arg("scenario"), py::arg("solution"));
  m.def("summary", &summary_text, py::arg("scenario"), py::arg("solution"));
  m.def("diagram", &diagram_text, py::arg("scenario"), py::arg("solution"));
  m.def("export_lp", &export_lp_text, py::arg("scenario"), py::arg("reduce") = true);
  m.def("stats", &stats_text, py::arg("scenario"));
  m.def("fixture", &fixture_text, py::arg("name"));
}
