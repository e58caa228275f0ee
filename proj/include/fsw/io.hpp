#pragma once

// Result files. All numbers are written with the shortest round-trip
// decimal form and '.' as separator, independent of the C++ locale.
//
//   traces.csv       time_s,<probe>_K,...
//   energy.csv       time_s,input_J,stored_J,loss_top_J,loss_side_J,loss_bottom_J,imbalance_rel
//   *.vtk            legacy ASCII STRUCTURED_POINTS, one point per cell centre
//   streamlines.csv  tracer_id,step,x,y,z
//   convergence.csv  iteration,evaluations,objective,spread,<param>...

#include "fsw/calibration.hpp"
#include "fsw/flow_kinematics.hpp"
#include "fsw/thermal_solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fsw {

/// A CSV with a header row and numeric columns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by name; throws InvalidArgument if absent.
  std::size_t column(const std::string &name) const;
  std::vector<double> values(std::size_t column) const;
};

CsvTable read_csv(const std::filesystem::path &path);
void write_csv(const std::filesystem::path &path, const CsvTable &table);

CsvTable traces_table(const RunHistory &history);
CsvTable energy_table(const std::vector<LedgerEntry> &ledger);
CsvTable streamlines_table(const std::vector<TracerPath> &paths);
CsvTable convergence_table(const CalibrationResult &result,
                           const std::vector<ParameterBounds> &free);

/// Targets from a traces-style CSV: first column time in s, every other
/// column one probe. A trailing "_K" on the column name is dropped.
std::vector<TargetTrace> read_targets(const std::filesystem::path &path);

struct VtkGrid {
  int nx = 0, ny = 0, nz = 0;
  double origin[3] = {0, 0, 0};
  double spacing[3] = {0, 0, 0};
  std::vector<double> temperature;
  std::vector<double> domain; // 0 workpiece, 1 backing, 2 void
};

VtkGrid vtk_grid(const ThermalField &field, const std::vector<double> &temperature);
void write_vtk(const std::filesystem::path &path, const VtkGrid &grid, const std::string &title);
VtkGrid read_vtk(const std::filesystem::path &path);

} // namespace fsw
