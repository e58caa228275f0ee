#pragma once

// Run configuration: a sectioned key/value text format.
//
//   # comment
//   [tool]
//   shoulder_radius = 9 mm
//   cone_angle = 10 deg
//
// Every dimensional value carries an explicit unit suffix and is converted
// to SI when parsed; dimensionless values are bare numbers. Unknown
// sections or keys, missing required keys, missing or mismatched units and
// type invariant violations are all reported as ConfigError with the line
// number. See README.md for the full key reference.

#include "fsw/calibration.hpp"
#include "fsw/flow_kinematics.hpp"
#include "fsw/thermal_solver.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fsw {

struct OutputSettings {
  std::string directory = "out";
  std::size_t snapshot_every = 0; // steps between field snapshots, 0 = none
  std::size_t ledger_every = 100; // steps between energy-ledger rows
  bool operator==(const OutputSettings &) const = default;
};

struct FlowSettings {
  FlowFieldConfig field;
  std::vector<Vec3> seeds;
  std::size_t random_seeds = 0; // extra seeds drawn with the --seed generator
  double t_end = 0.0;           // s
  double dt = 0.0;              // s
  double domain_half_width = 0.0; // m, tracers leaving |x|,|y| <= this stop
  double domain_depth = 0.0;      // m, tracers leaving z in [-depth, 0] stop
  bool operator==(const FlowSettings &) const = default;
};

struct CalibrationSettings {
  std::vector<ParameterBounds> free;
  std::string targets; // CSV path, relative paths resolve against the config file
  std::vector<double> weights; // per target column; empty = all 1
  std::size_t max_evaluations = 200;
  int coarsen = 1;
  double tolerance = 1e-6;
  bool operator==(const CalibrationSettings &) const = default;
};

struct RunConfig {
  std::string material_name;
  SimulationSetup setup;
  std::optional<double> reference_temperature; // K, for the heatgen table
  OutputSettings output;
  std::optional<FlowSettings> flow;
  std::optional<CalibrationSettings> calibration;
  bool operator==(const RunConfig &) const = default;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path &path);

/// Canonical SI text that parse_config reads back to an equal RunConfig.
std::string serialize_config(const RunConfig &config);

/// Parses "<number> <unit>" for a key's expected dimension, e.g.
/// parse_quantity("400 rpm", "rad/s") -> 41.8879... Exposed for tests.
double parse_quantity(std::string_view text, std::string_view si_unit);

/// Shortest decimal text that reads back to the same double; locale-free.
std::string format_number(double value);

} // namespace fsw
