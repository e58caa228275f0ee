#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fsw/calibration.hpp"
#include "fsw/cli.hpp"
#include "fsw/config.hpp"
#include "fsw/error.hpp"
#include "fsw/flow_kinematics.hpp"
#include "fsw/heat_generation.hpp"
#include "fsw/io.hpp"
#include "fsw/thermal_solver.hpp"

#include <sstream>

namespace py = pybind11;
using namespace fsw;

namespace {

py::dict history_dict(const RunHistory &h) {
  py::dict traces;
  for (std::size_t p = 0; p < h.probe_names.size(); ++p)
    traces[py::str(h.probe_names[p])] = h.traces[p];
  py::dict out;
  out["times"] = h.times;
  out["traces"] = traces;
  out["peak_temperature"] = h.peak_temperature();
  out["steps"] = h.steps;
  out["energy_input"] = h.final_ledger().flows.input;
  out["energy_stored"] = h.final_ledger().stored;
  out["energy_lost"] = h.final_ledger().flows.losses();
  out["ledger_imbalance"] = h.final_ledger().relative_imbalance();
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Friction stir welding thermal simulator";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ToolGeometry>(m, "ToolGeometry")
      .def(py::init<double, double, double, double, double>(), py::arg("shoulder_radius"),
           py::arg("probe_radius"), py::arg("probe_height"), py::arg("cone_angle") = 0.0,
           py::arg("tilt_angle") = 0.0)
      .def_property_readonly("shoulder_radius", &ToolGeometry::shoulder_radius)
      .def_property_readonly("probe_radius", &ToolGeometry::probe_radius)
      .def_property_readonly("probe_height", &ToolGeometry::probe_height)
      .def_property_readonly("cone_angle", &ToolGeometry::cone_angle);

  py::class_<HeatFractions>(m, "HeatFractions")
      .def_readonly("shoulder", &HeatFractions::shoulder)
      .def_readonly("probe_side", &HeatFractions::probe_side)
      .def_readonly("probe_tip", &HeatFractions::probe_tip)
      .def("__iter__", [](const HeatFractions &f) {
        return py::iter(py::make_tuple(f.shoulder, f.probe_side, f.probe_tip));
      });

  py::class_<TorquePower>(m, "TorquePower")
      .def_readonly("rotational", &TorquePower::rotational)
      .def_readonly("traverse", &TorquePower::traverse)
      .def_readonly("total", &TorquePower::total)
      .def_property_readonly("traverse_share", &TorquePower::traverse_share);

  m.def("heat_fractions", &heat_fractions, py::arg("tool"));
  m.def("total_heat", &total_heat, py::arg("tool"), py::arg("omega"), py::arg("tau"));
  m.def("total_heat_sticking", &total_heat_sticking, py::arg("tool"), py::arg("omega"),
        py::arg("sigma_yield"));
  m.def("total_heat_sliding", &total_heat_sliding, py::arg("tool"), py::arg("omega"),
        py::arg("mu"), py::arg("pressure"));
  m.def("total_heat_mixed", &total_heat_mixed, py::arg("tool"), py::arg("omega"),
        py::arg("delta"), py::arg("sigma_yield"), py::arg("mu"), py::arg("pressure"));
  m.def("power_from_torque", &power_from_torque, py::arg("torque"), py::arg("omega"),
        py::arg("traverse_force") = 0.0, py::arg("traverse_speed") = 0.0,
        py::arg("include_traverse") = false);

  py::class_<RunConfig>(m, "RunConfig")
      .def_property_readonly("probe_names",
                             [](const RunConfig &c) {
                               std::vector<std::string> names;
                               for (const auto &p : c.setup.probes)
                                 names.push_back(p.name);
                               return names;
                             })
      .def_property("grid",
                    [](const RunConfig &c) {
                      return py::make_tuple(c.setup.grid.nx, c.setup.grid.ny, c.setup.grid.nz);
                    },
                    [](RunConfig &c, std::tuple<int, int, int> g) {
                      c.setup.grid = {std::get<0>(g), std::get<1>(g), std::get<2>(g)};
                    })
      .def_property(
          "delta", [](const RunConfig &c) { return c.setup.heat.delta; },
          [](RunConfig &c, double d) {
            ContactModel(d, c.setup.heat.friction_coefficient, 1.0);
            c.setup.heat.delta = d;
          })
      .def("__eq__", [](const RunConfig &a, const RunConfig &b) { return a == b; });

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("serialize_config", &serialize_config, py::arg("config"));

  m.def(
      "simulate",
      [](const RunConfig &c) {
        RunHistory h;
        {
          py::gil_scoped_release release;
          h = run(c.setup);
        }
        return history_dict(h);
      },
      py::arg("config"), "Run the weld schedule; returns times, probe traces and energy totals.");

  m.def(
      "trace_flow",
      [](const RunConfig &c, const std::vector<Vec3> &seeds) {
        if (!c.flow)
          throw ConfigError("config has no [flow] section");
        const FlowField field(c.setup.tool, c.flow->field);
        const double hw = c.flow->domain_half_width;
        const Box box{{-hw, -hw, -c.flow->domain_depth}, {hw, hw, 0.0}};
        py::list out;
        for (const auto &p : advect_tracers(seeds.empty() ? c.flow->seeds : seeds, field,
                                            c.flow->t_end, c.flow->dt, box))
          out.append(py::make_tuple(p.points, std::string(tracer_status_name(p.status))));
        return out;
      },
      py::arg("config"), py::arg("seeds") = std::vector<Vec3>{},
      "Advect tracers through the kinematic flow field; returns (points, status) pairs.");

  m.def(
      "calibrate",
      [](const RunConfig &c, const std::vector<std::string> &free,
         const std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> &targets,
         std::size_t max_evaluations, std::uint64_t seed) {
        std::vector<ParameterBounds> bounds;
        for (const auto &name : free)
          bounds.push_back(default_bounds(parameter_from_name(name)));
        std::vector<TargetTrace> traces;
        for (const auto &[probe, tv] : targets)
          traces.push_back({probe, tv.first, tv.second, 1.0});
        const CalibrationProblem problem(c.setup, bounds, traces);
        CalibrationOptions options;
        options.max_evaluations = max_evaluations;
        options.seed = seed;
        CalibrationResult r;
        {
          py::gil_scoped_release release;
          r = calibrate(problem, options);
        }
        py::dict params;
        for (std::size_t n = 0; n < free.size(); ++n)
          params[py::str(free[n])] = r.params[n];
        py::dict out;
        out["params"] = params;
        out["objective"] = r.objective;
        out["converged"] = r.converged;
        out["evaluations"] = r.evaluations;
        return out;
      },
      py::arg("config"), py::arg("free"), py::arg("targets"), py::arg("max_evaluations") = 200,
      py::arg("seed") = 0,
      "Fit the named parameters to {probe: (times, values)} targets.");

  m.def(
      "run_cli",
      [](const std::vector<std::string> &args) {
        std::ostringstream out, err;
        std::vector<std::string> argv{"fswsim"};
        argv.insert(argv.end(), args.begin(), args.end());
        const int status = run_cli(argv, out, err);
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process; returns (status, stdout, stderr).");
}
