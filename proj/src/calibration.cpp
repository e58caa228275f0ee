#include "fsw/calibration.hpp"

#include "fsw/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace fsw {

namespace {

void require(bool condition, const std::string &message) {
  if (!condition)
    throw InvalidArgument(message);
}

double interpolate(const std::vector<double> &times, const std::vector<double> &values,
                   double t) {
  if (t <= times.front())
    return values.front();
  if (t >= times.back())
    return values.back();
  const auto upper = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(upper - times.begin());
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return values[i - 1] + w * (values[i] - values[i - 1]);
}

} // namespace

std::string_view parameter_name(CalibrationParameter which) {
  switch (which) {
  case CalibrationParameter::Delta:
    return "delta";
  case CalibrationParameter::FrictionCoefficient:
    return "friction_coefficient";
  case CalibrationParameter::Efficiency:
    return "efficiency";
  case CalibrationParameter::GapConductance:
    return "h_gap";
  }
  return "unknown";
}

CalibrationParameter parameter_from_name(std::string_view name) {
  for (auto which : {CalibrationParameter::Delta, CalibrationParameter::FrictionCoefficient,
                     CalibrationParameter::Efficiency, CalibrationParameter::GapConductance})
    if (parameter_name(which) == name)
      return which;
  throw InvalidArgument("unknown calibration parameter '" + std::string(name) + "'");
}

ParameterBounds default_bounds(CalibrationParameter which) {
  switch (which) {
  case CalibrationParameter::Delta:
    return {which, 0.0, 1.0, false};
  case CalibrationParameter::FrictionCoefficient:
    return {which, 0.05, 1.0, false};
  case CalibrationParameter::Efficiency:
    return {which, 0.9, 1.0, false};
  case CalibrationParameter::GapConductance:
    return {which, 10.0, 1.0e5, true};
  }
  throw InvalidArgument("unknown calibration parameter");
}

CalibrationProblem::CalibrationProblem(SimulationSetup base, std::vector<ParameterBounds> free,
                                       std::vector<TargetTrace> targets)
    : base_(std::move(base)), free_(std::move(free)), targets_(std::move(targets)) {
  require(!free_.empty(), "CalibrationProblem: at least one free parameter required");
  std::set<CalibrationParameter> seen;
  for (const auto &b : free_) {
    require(seen.insert(b.which).second, "CalibrationProblem: duplicate free parameter");
    require(std::isfinite(b.lower) && std::isfinite(b.upper) && b.lower < b.upper,
            "CalibrationProblem: bounds must be finite with lower < upper");
    require(!b.log_scale || b.lower > 0.0, "CalibrationProblem: log-scaled bounds must be > 0");
    if (b.which == CalibrationParameter::GapConductance)
      require(std::holds_alternative<GapConductance>(base_.solver.bottom),
              "CalibrationProblem: h_gap is free but the bottom contact is not 'gap'");
  }
  require(!targets_.empty(), "CalibrationProblem: at least one target trace required");
  for (const auto &t : targets_) {
    require(t.times.size() == t.values.size() && !t.times.empty(),
            "CalibrationProblem: target '" + t.probe + "' has mismatched or empty series");
    for (std::size_t n = 1; n < t.times.size(); ++n)
      require(t.times[n] > t.times[n - 1],
              "CalibrationProblem: target '" + t.probe + "' times are not strictly increasing");
    require(t.weight >= 0.0, "CalibrationProblem: weights must be >= 0");
    const bool known = std::any_of(base_.probes.begin(), base_.probes.end(),
                                   [&](const Probe &p) { return p.name == t.probe; });
    require(known, "CalibrationProblem: target '" + t.probe + "' names no configured probe");
  }
}

SimulationSetup CalibrationProblem::apply(const std::vector<double> &params) const {
  require(params.size() == free_.size(), "CalibrationProblem: wrong parameter count");
  SimulationSetup setup = base_;
  for (std::size_t n = 0; n < params.size(); ++n) {
    const auto &b = free_[n];
    const double v = params[n];
    require(v >= b.lower && v <= b.upper,
            "CalibrationProblem: " + std::string(parameter_name(b.which)) + " out of bounds");
    switch (b.which) {
    case CalibrationParameter::Delta:
      setup.heat.delta = v;
      break;
    case CalibrationParameter::FrictionCoefficient:
      setup.heat.friction_coefficient = v;
      break;
    case CalibrationParameter::Efficiency:
      setup.process = setup.process.with_efficiency(v);
      break;
    case CalibrationParameter::GapConductance: {
      const auto &gap = std::get<GapConductance>(setup.solver.bottom);
      setup.solver.bottom = GapConductance(v, gap.perfect_under_tool());
      break;
    }
    }
  }
  return setup;
}

double CalibrationProblem::objective(const RunHistory &history) const {
  double total = 0.0;
  for (const auto &target : targets_) {
    const auto it =
        std::find(history.probe_names.begin(), history.probe_names.end(), target.probe);
    require(it != history.probe_names.end(), "objective: no simulated trace for " + target.probe);
    const auto &trace = history.traces[static_cast<std::size_t>(it - history.probe_names.begin())];
    for (std::size_t n = 0; n < target.times.size(); ++n) {
      const double r = interpolate(history.times, trace, target.times[n]) - target.values[n];
      total += target.weight * r * r;
    }
  }
  return total;
}

double CalibrationProblem::objective(const std::vector<double> &params) const {
  const SimulationSetup setup = apply(params);
  try {
    RunOptions options;
    options.ledger_every = 0;
    return objective(run(setup, options));
  } catch (const std::exception &e) {
    std::ostringstream msg;
    msg << "forward run failed at";
    for (std::size_t n = 0; n < params.size(); ++n)
      msg << ' ' << parameter_name(free_[n].which) << '=' << params[n];
    msg << ": " << e.what();
    throw SimulationError(msg.str());
  }
}

CalibrationProblem CalibrationProblem::coarsened(int factor) const {
  require(factor >= 1, "CalibrationProblem: coarsening factor must be >= 1");
  SimulationSetup setup = base_;
  auto shrink = [factor](int n) {
    return std::max(1, static_cast<int>(std::lround(static_cast<double>(n) / factor)));
  };
  setup.grid = {shrink(base_.grid.nx), shrink(base_.grid.ny), shrink(base_.grid.nz)};
  return CalibrationProblem(std::move(setup), free_, targets_);
}

std::vector<double> CalibrationProblem::from_unit(const std::vector<double> &u) const {
  std::vector<double> out(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    const auto &b = free_[n];
    const double s = std::clamp(u[n], 0.0, 1.0);
    const double v = b.log_scale
                         ? std::exp(std::log(b.lower) + s * (std::log(b.upper) - std::log(b.lower)))
                         : b.lower + s * (b.upper - b.lower);
    out[n] = std::clamp(v, b.lower, b.upper);
  }
  return out;
}

std::vector<double> CalibrationProblem::to_unit(const std::vector<double> &params) const {
  std::vector<double> out(params.size());
  for (std::size_t n = 0; n < params.size(); ++n) {
    const auto &b = free_[n];
    const double v = std::clamp(params[n], b.lower, b.upper);
    out[n] = b.log_scale ? (std::log(v) - std::log(b.lower)) /
                               (std::log(b.upper) - std::log(b.lower))
                         : (v - b.lower) / (b.upper - b.lower);
  }
  return out;
}

// ---------------------------------------------------------------------------

CalibrationResult minimize_unit_box(const Objective &objective, std::size_t dimension,
                                    const std::vector<double> &start_unit,
                                    const CalibrationOptions &options) {
  require(dimension > 0, "minimize_unit_box: dimension must be > 0");
  require(start_unit.size() == dimension, "minimize_unit_box: start has the wrong dimension");
  require(options.max_evaluations > dimension, "minimize_unit_box: evaluation budget too small");

  using Point = std::vector<double>;
  constexpr double reflect = 1.0, expand = 2.0, contract = 0.5, shrink = 0.5;

  CalibrationResult result;
  auto clip = [](Point p) {
    for (double &x : p)
      x = std::clamp(x, 0.0, 1.0);
    return p;
  };
  auto evaluate = [&](const Point &p) {
    ++result.evaluations;
    return objective(p);
  };
  auto evaluate_all = [&](const std::vector<Point> &points) {
    std::vector<std::future<double>> jobs;
    for (const auto &p : points)
      jobs.push_back(std::async(std::launch::async, objective, p));
    std::vector<double> values;
    for (auto &job : jobs)
      values.push_back(job.get());
    result.evaluations += points.size();
    return values;
  };

  // Initial simplex: start point plus one perturbed vertex per axis. A
  // perturbation that would leave the box is mirrored.
  std::mt19937_64 rng(options.seed);
  std::vector<Point> simplex{clip(start_unit)};
  for (std::size_t d = 0; d < dimension; ++d) {
    Point p = simplex.front();
    double step = options.initial_step;
    if (options.seed != 0 && (rng() & 1u))
      step = -step;
    if (p[d] + step > 1.0 || p[d] + step < 0.0)
      step = -step;
    p[d] += step;
    simplex.push_back(clip(p));
  }
  std::vector<double> values = evaluate_all(simplex);

  auto order = [&] {
    std::vector<std::size_t> idx(simplex.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Point> s;
    std::vector<double> v;
    for (std::size_t i : idx) {
      s.push_back(simplex[i]);
      v.push_back(values[i]);
    }
    simplex = std::move(s);
    values = std::move(v);
  };

  for (;;) {
    order();
    const double best = values.front();
    const double spread = values.back() - best;
    result.spread = spread;
    result.history.push_back({result.iterations, result.evaluations, best, spread, simplex[0]});
    if (spread < options.tolerance * (1.0 + std::abs(best))) {
      result.converged = true;
      break;
    }
    if (result.evaluations + 2 > options.max_evaluations)
      break;
    ++result.iterations;

    const std::size_t worst = simplex.size() - 1;
    Point centroid(dimension, 0.0);
    for (std::size_t i = 0; i < worst; ++i)
      for (std::size_t d = 0; d < dimension; ++d)
        centroid[d] += simplex[i][d] / static_cast<double>(worst);
    auto along = [&](double coefficient) {
      Point p(dimension);
      for (std::size_t d = 0; d < dimension; ++d)
        p[d] = centroid[d] + coefficient * (simplex[worst][d] - centroid[d]);
      return clip(p);
    };

    const Point xr = along(-reflect);
    const double fr = evaluate(xr);
    if (fr < values.front()) {
      const Point xe = along(-expand);
      const double fe = evaluate(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[worst - 1]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Point xc = along(outside ? -contract : contract);
    const double fc = evaluate(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    // Shrink towards the best vertex.
    std::vector<Point> moved;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      Point p(dimension);
      for (std::size_t d = 0; d < dimension; ++d)
        p[d] = simplex[0][d] + shrink * (simplex[i][d] - simplex[0][d]);
      moved.push_back(clip(p));
    }
    const std::vector<double> fresh = evaluate_all(moved);
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      simplex[i] = moved[i - 1];
      values[i] = fresh[i - 1];
    }
  }

  result.params = simplex.front();
  result.objective = values.front();
  return result;
}

CalibrationResult calibrate(const CalibrationProblem &problem, const CalibrationOptions &options) {
  std::vector<double> start(problem.dimension(), 0.5);
  if (!options.start.empty())
    start = problem.to_unit(options.start);
  CalibrationResult result = minimize_unit_box(
      [&](const std::vector<double> &u) { return problem.objective(problem.from_unit(u)); },
      problem.dimension(), start, options);
  result.params = problem.from_unit(result.params);
  for (auto &record : result.history)
    record.best_params = problem.from_unit(record.best_params);
  return result;
}

} // namespace fsw
