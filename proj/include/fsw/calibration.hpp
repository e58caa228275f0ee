#pragma once

// Inverse estimation of contact and loss parameters by fitting simulated
// thermocouple traces to measured ones with a bounded Nelder-Mead search.

#include "fsw/thermal_solver.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace fsw {

enum class CalibrationParameter { Delta, FrictionCoefficient, Efficiency, GapConductance };

std::string_view parameter_name(CalibrationParameter which);
/// Inverse of parameter_name; throws InvalidArgument for unknown names.
CalibrationParameter parameter_from_name(std::string_view name);

struct ParameterBounds {
  CalibrationParameter which;
  double lower;
  double upper;
  /// Search in log space (h_gap spans four decades).
  bool log_scale = false;

  bool operator==(const ParameterBounds &) const = default;
};

/// delta in [0, 1], mu in [0.05, 1], eta in [0.9, 1], h_gap in [10, 1e5] (log).
ParameterBounds default_bounds(CalibrationParameter which);

struct TargetTrace {
  std::string probe;
  std::vector<double> times;  // s, strictly increasing
  std::vector<double> values; // K
  double weight = 1.0;

  bool operator==(const TargetTrace &) const = default;
};

class CalibrationProblem {
public:
  CalibrationProblem(SimulationSetup base, std::vector<ParameterBounds> free,
                     std::vector<TargetTrace> targets);

  std::size_t dimension() const noexcept { return free_.size(); }
  const std::vector<ParameterBounds> &free_parameters() const noexcept { return free_; }
  const std::vector<TargetTrace> &targets() const noexcept { return targets_; }
  const SimulationSetup &base() const noexcept { return base_; }

  /// Base setup with the free parameters replaced by `params`.
  SimulationSetup apply(const std::vector<double> &params) const;

  /// Weighted sum of squared residuals between a forward run at `params`
  /// and the targets, with the simulated traces linearly interpolated to the
  /// target times.
  double objective(const std::vector<double> &params) const;

  /// Residual sum for an already computed run.
  double objective(const RunHistory &history) const;

  /// Same problem on a grid with every cell count divided by `factor`
  /// (rounded, at least one cell per axis).
  CalibrationProblem coarsened(int factor) const;

  /// Maps unit-cube coordinates to parameter values and back.
  std::vector<double> from_unit(const std::vector<double> &u) const;
  std::vector<double> to_unit(const std::vector<double> &params) const;

private:
  SimulationSetup base_;
  std::vector<ParameterBounds> free_;
  std::vector<TargetTrace> targets_;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t evaluations = 0;
  double best_objective = 0.0;
  double spread = 0.0;
  std::vector<double> best_params;
};

struct CalibrationOptions {
  std::size_t max_evaluations = 200;
  double tolerance = 1e-6;   // stop when spread < tolerance * (1 + best)
  double initial_step = 0.1; // fraction of each parameter range
  /// 0 keeps every initial perturbation positive; any other value draws the
  /// per-axis signs from a generator seeded with it.
  std::uint64_t seed = 0;
  /// Start from this point instead of the box centre.
  std::vector<double> start;
};

struct CalibrationResult {
  std::vector<double> params;
  double objective = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  double spread = 0.0;
  std::vector<IterationRecord> history;
};

using Objective = std::function<double(const std::vector<double> &)>;

/// Nelder-Mead on [0, 1]^n with coordinate clipping. `objective` receives
/// unit-cube coordinates. Vertex evaluations of the initial simplex and of
/// shrink steps run concurrently.
CalibrationResult minimize_unit_box(const Objective &objective, std::size_t dimension,
                                    const std::vector<double> &start_unit,
                                    const CalibrationOptions &options);

CalibrationResult calibrate(const CalibrationProblem &problem,
                            const CalibrationOptions &options = {});

} // namespace fsw
