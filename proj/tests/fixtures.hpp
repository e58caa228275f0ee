#pragma once

#include "fsw/thermal_solver.hpp"

namespace fixture {

inline fsw::ToolGeometry paper_tool() { return fsw::ToolGeometry(0.009, 0.003, 0.004, 10.0 * fsw::pi / 180.0); }

inline fsw::ThermophysicalTable aluminium() {
  using fsw::PropertyTable;
  return fsw::ThermophysicalTable(
      2700.0, PropertyTable({{293.0, 167.0}, {573.0, 180.0}, {773.0, 190.0}}),
      PropertyTable({{293.0, 896.0}, {573.0, 1000.0}, {773.0, 1080.0}}),
      PropertyTable({{293.0, 276e6}, {473.0, 215e6}, {573.0, 110e6}, {673.0, 40e6},
                     {773.0, 10e6}, {855.0, 0.0}},
                    true),
      0.3);
}

inline fsw::ThermophysicalTable steel() {
  return fsw::ThermophysicalTable(7850.0, fsw::PropertyTable::constant(45.0),
                                  fsw::PropertyTable::constant(480.0), std::nullopt, 0.0);
}

/// Plate 80 x 50 x 5 mm, dwell then traverse, coarse grid. Runs in well
/// under a second.
inline fsw::SimulationSetup desk_setup(double omega = 400.0 * 2.0 * fsw::pi / 60.0,
                                       double v_trans = 400e-3 / 60.0,
                                       fsw::GridResolution grid = {32, 20, 4},
                                       double traverse_distance = 0.030) {
  using namespace fsw;
  const ToolGeometry tool = paper_tool();
  SolverConfig solver;
  solver.h_top = 15.0;
  solver.h_side = 15.0;
  solver.bottom = GapConductance(1000.0, true);
  solver.backing_thickness = 0.010;
  std::vector<WeldPhase> phases{{PhaseKind::Dwell, 2.0, omega},
                                {PhaseKind::Traverse, traverse_distance / v_trans, omega, v_trans}};
  return SimulationSetup{
      .tool = tool,
      .process = ProcessParameters(omega, v_trans, 10e3, 40.0, 2e3, 0.95),
      .heat = HeatSourceSettings{.delta = 0.5, .friction_coefficient = 0.3},
      .workpiece = WorkpieceGeometry(0.080, 0.050, 0.005, 0.0, tool),
      .material = aluminium(),
      .backing_material = steel(),
      .solver = solver,
      .grid = grid,
      .schedule = WeldSchedule(std::move(phases)),
      .start_x = 0.020,
      .probes = {{"near", 0.050, 0.037, 0.0025}, {"bottom", 0.050, 0.040, 0.0005}}};
}

} // namespace fixture

namespace fixture {

/// 1D slab through the plate thickness: a single column with insulated
/// sides and constant properties.
struct Slab {
  double length = 0.01;
  double k = 50.0, rho = 2000.0, cp = 500.0;
  double kappa() const { return k / (rho * cp); }

  fsw::ThermalModel model(int nz, std::optional<double> t_bottom, std::optional<double> t_top,
                          double t_initial) const {
    using namespace fsw;
    const ToolGeometry tool(0.001, 0.0005, 0.001);
    SolverConfig cfg;
    cfg.ambient = t_initial;
    cfg.h_top = 0.0;
    cfg.h_side = 0.0;
    cfg.fixed_face_temperature[static_cast<int>(Face::ZMin)] = t_bottom;
    cfg.fixed_face_temperature[static_cast<int>(Face::ZMax)] = t_top;
    const ThermophysicalTable mat(rho, PropertyTable::constant(k), PropertyTable::constant(cp),
                                  std::nullopt, 0.0);
    return ThermalModel(WorkpieceGeometry(0.004, 0.004, length), GridResolution{1, 1, nz}, tool,
                        MaterialSet(mat, mat), cfg);
  }
};

} // namespace fixture
