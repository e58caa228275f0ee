// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "fsw/calibration.hpp"
#include "fsw/config.hpp"
#include "fsw/flow_kinematics.hpp"
#include "fsw/heat_generation.hpp"
#include "fsw/thermal_solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace fsw;

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double rpm = 2.0 * pi / 60.0;
constexpr double mm_per_min = 1e-3 / 60.0;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

ToolGeometry random_tool(std::mt19937_64 &rng, bool flat) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rs = 0.004 + 0.016 * u(rng);
  const double rp = rs * (0.1 + 0.8 * u(rng));
  const double hp = 0.001 + 0.012 * u(rng);
  const double alpha = flat ? 0.0 : 0.35 * u(rng);
  return ToolGeometry(rs, rp, hp, alpha);
}

Outcome heat_fraction_values() {
  const HeatFractions f = heat_fractions(fixture::paper_tool());
  const bool ok = std::abs(f.shoulder - 0.86) <= 0.005 && std::abs(f.probe_side - 0.11) <= 0.005 &&
                  std::abs(f.probe_tip - 0.03) <= 0.005;
  return {ok, "(" + num(f.shoulder) + ", " + num(f.probe_side) + ", " + num(f.probe_tip) + ")"};
}

Outcome analytical_vs_quadrature() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const ToolGeometry t = random_tool(rng, false);
    const double omega = (100.0 + 1400.0 * u(rng)) * rpm;
    const double tau = 1e6 + 1.5e8 * u(rng);
    const auto q = oracle::integrate_tool_surface(t.shoulder_radius(), t.probe_radius(),
                                                  t.probe_height(), t.cone_angle(), omega, tau);
    const double rel = std::abs(total_heat(t, omega, tau) - q.total()) / q.total();
    worst = std::max(worst, rel);
  }
  return {worst < 1e-3, "worst relative difference " + num(worst, 3) + " over 100 geometries"};
}

Outcome flat_shoulder_identity() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const ToolGeometry t = random_tool(rng, true);
    const double omega = (100.0 + 1400.0 * u(rng)) * rpm, tau = 1e6 + 1.5e8 * u(rng);
    const double a = total_heat(t, omega, tau), b = total_heat_flat_shoulder(t, omega, tau);
    worst = std::max(worst, std::abs(a - b) / (eps * a));
  }
  return {worst <= 4.0, "worst difference " + num(worst, 3) + " ulp-scale units"};
}

Outcome mixed_endpoints() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool ok = true;
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const ToolGeometry t = random_tool(rng, u(rng) < 0.3);
    const double omega = 40.0 + 60.0 * u(rng), sigma = 20e6 + 200e6 * u(rng);
    const double mu = 0.1 + 0.5 * u(rng), p = 1e6 + 1e8 * u(rng);
    const double stick = total_heat_sticking(t, omega, sigma);
    const double slide = total_heat_sliding(t, omega, mu, p);
    ok = ok && total_heat_mixed(t, omega, 1.0, sigma, mu, p) == stick;
    ok = ok && total_heat_mixed(t, omega, 0.0, sigma, mu, p) == slide;
    for (double d : {0.2, 0.5, 0.85}) {
      const double expected = d * stick + (1.0 - d) * slide;
      const double rel = std::abs(total_heat_mixed(t, omega, d, sigma, mu, p) - expected) /
                         (eps * expected);
      worst = std::max(worst, rel);
    }
  }
  ok = ok && worst <= 8.0;
  return {ok, "endpoints exact, interior affinity within " + num(worst, 3) + " eps"};
}

Outcome solver_verification() {
  const fixture::Slab slab;
  // Transient: plate at 300 K, both faces stepped to 400 K.
  const ThermalModel m = slab.model(40, 400.0, 400.0, 300.0);
  double worst_transient = 0.0;
  for (double fo : {0.02, 0.05, 0.1, 0.3}) {
    ThermalField f = m.initial_field(0.002, 0.002);
    const double t_end = fo * slab.length * slab.length / slab.kappa();
    while (f.time < t_end - 1e-12)
      m.step(f, {}, std::min(m.stable_timestep(f), t_end - f.time));
    for (int k = 1; k < f.nz - 1; ++k) {
      const double exact =
          oracle::slab_fourier(f.z_center(k), t_end, slab.length, slab.kappa(), 300.0, 400.0);
      worst_transient =
          std::max(worst_transient, std::abs(f.temperature[f.index(0, 0, k)] - exact) / 100.0);
    }
  }
  // Steady: faces at 300 K and 500 K.
  const ThermalModel s = slab.model(20, 300.0, 500.0, 300.0);
  ThermalField f = s.initial_field(0.002, 0.002);
  const double t_end = 3.0 * slab.length * slab.length / slab.kappa();
  while (f.time < t_end)
    s.step(f, {}, s.stable_timestep(f));
  double worst_steady = 0.0;
  for (int k = 0; k < f.nz; ++k) {
    const double exact = 300.0 + 200.0 * f.z_center(k) / slab.length;
    worst_steady = std::max(worst_steady, std::abs(f.temperature[f.index(0, 0, k)] - exact) / 200.0);
  }
  return {worst_transient < 0.01 && worst_steady < 0.005,
          "transient error " + num(100.0 * worst_transient, 3) + "% of dT, steady error " +
              num(100.0 * worst_steady, 3) + "% of dT"};
}

Outcome conservation() {
  SimulationSetup s = fixture::desk_setup();
  SolverConfig cfg = s.solver;
  cfg.bottom = Adiabatic{};
  cfg.h_top = 0.0;
  cfg.h_side = 0.0;
  ThermophysicalTable mat = s.material;
  mat.emissivity = 0.0;
  const ThermalModel m(s.workpiece, {16, 10, 4}, s.tool, MaterialSet(mat, s.backing_material), cfg);
  ThermalField f = m.initial_field(0.03, 0.025);
  for (std::size_t c = 0; c < f.size(); ++c) {
    f.temperature[c] = 300.0 + 250.0 * (0.5 + 0.5 * std::sin(1.3 * static_cast<double>(c)));
    f.enthalpy[c] = m.materials().enthalpy(f.tag[c]).enthalpy(f.temperature[c]);
  }
  const double h0 = m.total_enthalpy(f);
  for (int n = 0; n < 10000; ++n)
    m.step(f, {}, m.stable_timestep(f));
  const double drift = std::abs(m.total_enthalpy(f) - h0) / std::abs(h0);

  // Ledger closure on weld runs with every bottom option and the shipped
  // example.
  double worst_ledger = 0.0;
  const BottomContactCondition bottoms[] = {Adiabatic{}, PerfectContact{},
                                            SparContact(0.02, 0.008), GapConductance(1000.0)};
  for (const auto &b : bottoms) {
    SimulationSetup run_setup = fixture::desk_setup();
    run_setup.solver.bottom = b;
    run_setup.solver.source_mode = SourceMode::SurfacePlusVolumetric;
    run_setup.probes.pop_back();
    const RunHistory h = run(run_setup);
    for (const auto &row : h.ledger)
      worst_ledger = std::max(worst_ledger, row.relative_imbalance());
  }
  RunConfig example = load_config(FSW_DATA_DIR "/example_weld.cfg");
  example.setup.grid = {30, 15, 3};
  for (const auto &row : run(example.setup).ledger)
    worst_ledger = std::max(worst_ledger, row.relative_imbalance());

  return {drift < 1e-6 && worst_ledger < 1e-3,
          "enthalpy drift " + num(drift, 3) + " over 1e4 steps, worst ledger imbalance " +
              num(worst_ledger, 3)};
}

double peak_for(double omega, double v_trans, BottomContactCondition bottom = GapConductance(1000.0)) {
  SimulationSetup s = fixture::desk_setup(omega, v_trans, {32, 20, 4}, 0.030);
  s.solver.bottom = bottom;
  return run(s).peak_temperature();
}

Outcome trends() {
  const double v200 = peak_for(400 * rpm, 200 * mm_per_min);
  const double v400 = peak_for(400 * rpm, 400 * mm_per_min);
  const double v600 = peak_for(400 * rpm, 600 * mm_per_min);
  const double w200 = peak_for(200 * rpm, 400 * mm_per_min);
  const double w600 = peak_for(600 * rpm, 400 * mm_per_min);
  const bool ok = v200 > v400 && v400 > v600 && w200 < v400 && v400 < w600;
  return {ok, "peak K vs v {200,400,600} mm/min: " + num(v200, 5) + " > " + num(v400, 5) + " > " +
                  num(v600, 5) + "; vs omega {200,400,600} rpm: " + num(w200, 5) + " < " +
                  num(v400, 5) + " < " + num(w600, 5)};
}

Outcome boundary_ordering() {
  const double adiabatic = peak_for(400 * rpm, 400 * mm_per_min, Adiabatic{});
  const double gap = peak_for(400 * rpm, 400 * mm_per_min, GapConductance(1000.0));
  const double perfect = peak_for(400 * rpm, 400 * mm_per_min, PerfectContact{});
  return {adiabatic > gap && gap > perfect, "peak K adiabatic " + num(adiabatic, 5) + " > gap " +
                                                num(gap, 5) + " > perfect " + num(perfect, 5)};
}

// Calibration setups: a coarse grid and two bottom thermocouples, one under
// the tool path and one off to the side where the gap matters.
SimulationSetup calibration_setup(double delta, double h_gap) {
  SimulationSetup s = fixture::desk_setup(400 * rpm, 400 * mm_per_min, {16, 10, 2}, 0.030);
  s.heat.delta = delta;
  s.solver.bottom = GapConductance(h_gap, true);
  s.probes = {{"top", 0.045, 0.034, 0.004}, {"side", 0.045, 0.042, 0.001}};
  return s;
}

std::vector<TargetTrace> synthetic_targets(const SimulationSetup &s) {
  const RunHistory h = run(s);
  std::vector<TargetTrace> targets;
  for (std::size_t p = 0; p < h.probe_names.size(); ++p) {
    TargetTrace t{h.probe_names[p], {}, {}};
    for (double time = 0.5; time < h.times.back(); time += 0.5) {
      const auto it = std::lower_bound(h.times.begin(), h.times.end(), time);
      const std::size_t n = static_cast<std::size_t>(it - h.times.begin());
      const double w = (time - h.times[n - 1]) / (h.times[n] - h.times[n - 1]);
      t.times.push_back(time);
      t.values.push_back((1.0 - w) * h.traces[p][n - 1] + w * h.traces[p][n]);
    }
    targets.push_back(std::move(t));
  }
  return targets;
}

Outcome calibration_round_trip() {
  CalibrationOptions opt;
  opt.tolerance = 1e-10;
  opt.max_evaluations = 120;

  const SimulationSetup truth1 = calibration_setup(0.4, 1000.0);
  const CalibrationProblem one(truth1, {default_bounds(CalibrationParameter::Delta)},
                               synthetic_targets(truth1));
  const CalibrationResult r1 = calibrate(one, opt);
  const double d1 = r1.params[0];

  const SimulationSetup truth2 = calibration_setup(0.4, 2500.0);
  const CalibrationProblem two(truth2,
                               {default_bounds(CalibrationParameter::Delta),
                                default_bounds(CalibrationParameter::GapConductance)},
                               synthetic_targets(truth2));
  opt.max_evaluations = 200;
  const CalibrationResult r2 = calibrate(two, opt);
  const double d2 = r2.params[0], h2 = r2.params[1];

  const bool ok = std::abs(d1 - 0.4) <= 0.02 && std::abs(d2 - 0.4) / 0.4 <= 0.05 &&
                  std::abs(h2 - 2500.0) / 2500.0 <= 0.05;
  return {ok, "delta " + num(d1, 5) + " (" + std::to_string(r1.evaluations) + " runs); delta " +
                  num(d2, 5) + ", h_gap " + num(h2, 5) + " W/(m2 K) (" +
                  std::to_string(r2.evaluations) + " runs)"};
}

Outcome flow_properties() {
  const ToolGeometry tool = fixture::paper_tool();
  const double omega = 0.5 * 400 * rpm;
  const FlowFieldConfig cfg{.shear_zone_radius = 0.009,
                            .omega = omega,
                            .traverse_speed = 400 * mm_per_min,
                            .circulation = 2e-4,
                            .core_radius = 0.0015,
                            .ring_radius = 0.006,
                            .ring_depth = -0.002};
  const FlowField field(tool, cfg);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.012, 0.012), z(-0.005, 0.0);
  double worst_div = 0.0;
  for (int n = 0; n < 500;) {
    const Vec3 p{u(rng), u(rng), z(rng)};
    if (field.inside_probe(p) || std::hypot(p[0], p[1]) < tool.probe_radius() + 1e-5)
      continue;
    worst_div = std::max(worst_div, std::abs(numerical_divergence(field, p, 1e-7)));
    ++n;
  }

  FlowFieldConfig rot = cfg;
  rot.traverse_speed = 0.0;
  rot.circulation = 0.0;
  const FlowField rotation(tool, rot);
  double worst_closure = 0.0;
  for (double r : {0.004, 0.006, 0.008}) {
    const Vec3 seed{r, 0.0, -0.001};
    const double period = 2.0 * pi / rotation.angular_speed(r);
    const auto path = advect_tracers({seed}, rotation, period, period / 200.0);
    const Vec3 &end = path[0].points.back();
    worst_closure = std::max(worst_closure, std::hypot(end[0] - seed[0], end[1] - seed[1]) / r);
  }

  // Step halving against a reference with 16x smaller steps.
  const Vec3 seed{0.005, 0.001, -0.003};
  const double t_end = 0.2;
  auto end_point = [&](double dt) {
    return advect_tracers({seed}, field, t_end, dt)[0].points.back();
  };
  // The rotation rate has slope breaks at the probe radius and the shear
  // zone edge; the order test needs a path that stays between them.
  const auto ref_path = advect_tracers({seed}, field, t_end, 1.25e-4 / 16.0)[0].points;
  double r_min = 1.0, r_max = 0.0;
  for (const Vec3 &q : ref_path) {
    r_min = std::min(r_min, std::hypot(q[0], q[1]));
    r_max = std::max(r_max, std::hypot(q[0], q[1]));
  }
  const bool smooth_path = r_min > tool.probe_radius() && r_max < cfg.shear_zone_radius;
  const Vec3 ref = ref_path.back();
  auto err = [&](double dt) {
    const Vec3 e = end_point(dt);
    return std::hypot(e[0] - ref[0], e[1] - ref[1], e[2] - ref[2]);
  };
  const double order = std::log2(err(2e-3) / err(1e-3));
  const bool ok = worst_div < 1e-6 * omega && worst_closure < 1e-4 && smooth_path &&
                  std::abs(order - 4.0) < 0.5;
  return {ok, "max |div u| " + num(worst_div, 3) + " 1/s, orbit closure " +
                  num(worst_closure, 3) + " r, observed order " + num(order, 3) +
                  " (path r in [" + num(r_min * 1e3, 3) + ", " + num(r_max * 1e3, 3) + "] mm)"};
}

Outcome traverse_power_share() {
  const TorquePower p = power_from_torque(40.0, 400 * rpm, 2e3, 0.005);
  return {p.traverse_share() < 0.01, "traverse share " + num(100.0 * p.traverse_share(), 3) + "%"};
}

} // namespace

int main() {
  const std::pair<const char *, std::function<Outcome()>> criteria[] = {
      {"heat fractions of the 9/3/4 mm, 10 deg tool", heat_fraction_values},
      {"closed-form heat vs surface quadrature", analytical_vs_quadrature},
      {"flat-shoulder closed form identity", flat_shoulder_identity},
      {"mixed contact endpoints and affinity", mixed_endpoints},
      {"slab transient and steady verification", solver_verification},
      {"energy conservation and ledger closure", conservation},
      {"peak temperature trends in v_trans and omega", trends},
      {"backing boundary ordering", boundary_ordering},
      {"calibration round trip", calibration_round_trip},
      {"flow field properties", flow_properties},
      {"traverse power negligibility", traverse_power_share},
  };
  int failed = 0, index = 0;
  for (const auto &[name, check] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
