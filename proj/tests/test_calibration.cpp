#include "doctest.h"

#include "fixtures.hpp"

#include "fsw/calibration.hpp"
#include "fsw/error.hpp"

#include <cmath>

using namespace fsw;

TEST_CASE("parameter names and bounds") {
  for (auto p : {CalibrationParameter::Delta, CalibrationParameter::FrictionCoefficient,
                 CalibrationParameter::Efficiency, CalibrationParameter::GapConductance})
    CHECK(parameter_from_name(parameter_name(p)) == p);
  CHECK_THROWS_AS(parameter_from_name("omega"), InvalidArgument);
  CHECK(default_bounds(CalibrationParameter::GapConductance).log_scale);
}

TEST_CASE("Nelder-Mead on a shifted quadratic") {
  const auto f = [](const std::vector<double> &u) {
    return std::pow(u[0] - 0.3, 2) + 4.0 * std::pow(u[1] - 0.7, 2);
  };
  CalibrationOptions opt;
  opt.tolerance = 1e-12;
  opt.max_evaluations = 500;
  const CalibrationResult r = minimize_unit_box(f, 2, {0.5, 0.5}, opt);
  CHECK(r.converged);
  CHECK(r.params[0] == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(r.params[1] == doctest::Approx(0.7).epsilon(1e-4));
  CHECK(r.evaluations <= 500);
  CHECK_FALSE(r.history.empty());
}

TEST_CASE("Nelder-Mead stays in the box and reports budget exhaustion") {
  const auto f = [](const std::vector<double> &u) {
    CHECK(u[0] >= 0.0);
    CHECK(u[0] <= 1.0);
    return -u[0];
  };
  CalibrationOptions opt;
  opt.max_evaluations = 30;
  opt.tolerance = 0.0;
  const CalibrationResult r = minimize_unit_box(f, 1, {0.5}, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations <= 30);
  CHECK(r.params[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("seeded perturbations are reproducible") {
  const auto f = [](const std::vector<double> &u) {
    return std::pow(u[0] - 0.2, 2) + std::pow(u[1] - 0.9, 2) + std::pow(u[2] - 0.5, 2);
  };
  CalibrationOptions opt;
  opt.seed = 42;
  const auto a = minimize_unit_box(f, 3, {0.5, 0.5, 0.5}, opt);
  const auto b = minimize_unit_box(f, 3, {0.5, 0.5, 0.5}, opt);
  CHECK(a.params == b.params);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("problem mapping and validation") {
  const SimulationSetup s = fixture::desk_setup();
  const TargetTrace target{"near", {1.0, 2.0}, {300.0, 310.0}};
  const CalibrationProblem p(s,
                             {default_bounds(CalibrationParameter::Delta),
                              default_bounds(CalibrationParameter::GapConductance)},
                             {target});
  const auto v = p.from_unit({0.5, 0.5});
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(1000.0).epsilon(1e-12)); // geometric mid of [10, 1e5]
  CHECK(p.to_unit(v)[1] == doctest::Approx(0.5));
  const SimulationSetup applied = p.apply({0.25, 2500.0});
  CHECK(applied.heat.delta == 0.25);
  CHECK(std::get<GapConductance>(applied.solver.bottom).h_gap() == 2500.0);
  CHECK(p.coarsened(2).base().grid.nx == 16);

  CHECK_THROWS_AS(CalibrationProblem(s, {}, {target}), InvalidArgument);
  CHECK_THROWS_AS(CalibrationProblem(s, {default_bounds(CalibrationParameter::Delta)},
                                     {TargetTrace{"nowhere", {1.0}, {300.0}}}),
                  InvalidArgument);
  SimulationSetup adiabatic = s;
  adiabatic.solver.bottom = Adiabatic{};
  CHECK_THROWS_AS(
      CalibrationProblem(adiabatic, {default_bounds(CalibrationParameter::GapConductance)},
                         {target}),
      InvalidArgument);
}

TEST_CASE("objective is zero at the generating parameters") {
  const SimulationSetup s = fixture::desk_setup(41.9, 0.005, {16, 10, 2});
  const RunHistory h = run(s);
  TargetTrace t{"near", {}, {}};
  for (std::size_t n = 0; n < h.times.size(); n += 10) {
    t.times.push_back(h.times[n]);
    t.values.push_back(h.traces[0][n]);
  }
  const CalibrationProblem p(s, {default_bounds(CalibrationParameter::Delta)}, {t});
  CHECK(p.objective({0.5}) == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(p.objective({0.3}) > 1.0);
}
