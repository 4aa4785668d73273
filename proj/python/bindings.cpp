#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "gradsat/bench.hpp"
#include "gradsat/engine.hpp"
#include "gradsat/ir.hpp"

namespace py = pybind11;

namespace gradsat {
namespace {

Assignment to_assignment(const Program& p, const py::dict& d) {
  Assignment a;
  a.reals.assign(p.reals.size(), 0.0);
  a.bools.assign(p.bools.size(), 0);
  if (d.contains("reals")) {
    for (auto item : d["reals"].cast<py::dict>()) {
      std::string name = item.first.cast<std::string>();
      bool found = false;
      for (std::size_t i = 0; i < p.reals.size(); ++i)
        if (p.reals[i].name == name) {
          a.reals[i] = item.second.cast<double>();
          found = true;
        }
      if (!found) throw py::value_error("unknown real unknown '" + name + "'");
    }
  }
  if (d.contains("bools")) {
    for (auto item : d["bools"].cast<py::dict>()) {
      std::string name = item.first.cast<std::string>();
      bool found = false;
      for (std::size_t i = 0; i < p.bools.size(); ++i)
        if (p.bools[i] == name) {
          a.bools[i] = item.second.cast<bool>() ? 1 : 0;
          found = true;
        }
      if (!found) throw py::value_error("unknown Boolean unknown '" + name + "'");
    }
  }
  return a;
}

py::dict from_assignment(const Program& p, const Assignment& a) {
  py::dict reals, bools;
  for (std::size_t i = 0; i < p.reals.size(); ++i) reals[py::str(p.reals[i].name)] = a.reals[i];
  for (std::size_t i = 0; i < p.bools.size(); ++i)
    bools[py::str(p.bools[i])] = a.bools[i] != 0;
  py::dict out;
  out["reals"] = reals;
  out["bools"] = bools;
  return out;
}

py::dict run_solve(const Program& p, int eta, int restart_limit, double timeout, std::uint64_t seed,
                   double eps, bool baseline, int restarts,
                   std::optional<std::vector<double>> beta_schedule) {
  EngineConfig cfg;
  cfg.eta = eta;
  cfg.restart_limit = restart_limit;
  cfg.timeout_sec = timeout;
  cfg.opt.seed = seed;
  cfg.opt.eps = eps;
  cfg.baseline = baseline;
  cfg.baseline_restarts = restarts;
  if (beta_schedule) cfg.opt.beta_schedule = *beta_schedule;

  EngineResult res;
  {
    py::gil_scoped_release release;
    Engine eng(p, cfg);
    res = eng.run();
  }

  py::dict out;
  out["status"] = res.status == EngineResult::Status::Sat     ? "sat"
                  : res.status == EngineResult::Status::Unsat ? "unsat"
                                                              : "unknown";
  out["verified"] = res.verified;
  if (res.status == EngineResult::Status::Sat) out["assignment"] = from_assignment(p, res.assignment);
  py::dict stats;
  stats["numeric_calls"] = res.stats.numeric_calls;
  stats["restarts"] = res.stats.restarts;
  stats["wall_ms"] = res.stats.wall_ms;
  stats["soft_conflicts"] = res.stats.soft_conflicts;
  stats["suggestion_rounds"] = res.stats.suggestion_rounds;
  out["stats"] = stats;
  return out;
}

}  // namespace

PYBIND11_MODULE(_gradsat, m) {
  m.doc() = "Constraint-coupled program synthesis: smoothed numerical search "
            "steered by an incremental SAT core";

  py::register_exception<ParseError>(m, "ProgramParseError", PyExc_ValueError);

  py::class_<Program>(m, "Program")
      .def_property_readonly("real_names",
                             [](const Program& p) {
                               std::vector<std::string> out;
                               for (const auto& r : p.reals) out.push_back(r.name);
                               return out;
                             })
      .def_property_readonly("bool_names", [](const Program& p) { return p.bools; })
      .def_property_readonly("num_asserts",
                             [](const Program& p) { return p.asserts.size(); })
      .def("verify",
           [](const Program& p, const py::dict& sigma) { return p.verify(to_assignment(p, sigma)); },
           py::arg("assignment"),
           "Exact-semantics check of every requirement under a concrete assignment")
      .def("__str__", [](const Program& p) { return p.print(); });

  py::class_<BenchInfo>(m, "Bench")
      .def_property_readonly("program", [](const BenchInfo& b) { return b.program; })
      .def_property_readonly("columns", [](const BenchInfo& b) { return b.columns; })
      .def_property_readonly("dt", [](const BenchInfo& b) { return b.dt; })
      .def("trajectory_csv",
           [](const BenchInfo& b, const py::dict& sigma) {
             return trajectory_csv(b, to_assignment(b.program, sigma));
           },
           py::arg("assignment"));

  m.def("parse", [](const std::string& text) { return parse_program(text); }, py::arg("text"),
        "Parse a program in s-expression form");

  m.def("make_bench",
        [](const std::string& name, int steps, double dt, double dwell, const std::string& task,
           const std::string& physics) {
          PhysicsConfig phys = physics.empty() ? PhysicsConfig{} : PhysicsConfig::load(physics);
          return make_bench(name, steps, dt, dwell, task, phys);
        },
        py::arg("name"), py::arg("steps") = 25, py::arg("dt") = 1.0, py::arg("dwell") = 20.0,
        py::arg("task") = "landing", py::arg("physics") = "",
        "Generate a built-in benchmark: staircase, thermostat, pointcar, or quad");

  m.def("solve", &run_solve, py::arg("program"), py::arg("eta") = 5,
        py::arg("restart_limit") = 3, py::arg("timeout") = 0.0, py::arg("seed") = 0,
        py::arg("eps") = 1e-4, py::arg("baseline") = false, py::arg("restarts") = 20,
        py::arg("beta_schedule") = std::nullopt,
        "Run the full synthesis loop; returns a dict with status / assignment / stats");
}

}  // namespace gradsat
