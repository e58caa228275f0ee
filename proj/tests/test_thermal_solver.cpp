#include "doctest.h"

#include "fixtures.hpp"
#include "oracles.hpp"

#include "fsw/error.hpp"
#include "fsw/thermal_solver.hpp"

#include <algorithm>
#include <cmath>

using namespace fsw;

TEST_CASE("top surface loss") {
  // eps sigma (400^4 - 300^4)
  CHECK(top_surface_loss(400.0, 1.0, 300.0, 0.0) == doctest::Approx(992.3155).epsilon(1e-6));
  CHECK(top_surface_loss(400.0, 0.0, 300.0, 10.0) == doctest::Approx(1000.0));
  CHECK(top_surface_loss(300.0, 0.5, 300.0, 10.0) == 0.0);
}

TEST_CASE("bottom coupling options") {
  using K = InterfaceCoupling::Kind;
  CHECK(bottom_surface_coupling(Adiabatic{}, true, true).kind == K::Insulated);
  CHECK(bottom_surface_coupling(PerfectContact{}, false, true).kind == K::Perfect);
  CHECK(bottom_surface_coupling(SparContact(0.02, 0.01), false, true).kind == K::Perfect);
  CHECK(bottom_surface_coupling(SparContact(0.02, 0.01), false, false).kind == K::Insulated);
  CHECK(bottom_surface_coupling(GapConductance(500.0), true, true).kind == K::Perfect);
  const auto gap = bottom_surface_coupling(GapConductance(500.0), false, true);
  CHECK(gap.kind == K::Conductance);
  CHECK(gap.h == 500.0);
  CHECK(bottom_surface_coupling(GapConductance(500.0, false), true, true).kind == K::Conductance);
  CHECK(gap_flux(500.0, 400.0, 300.0) == doctest::Approx(5e4));
}

TEST_CASE("grid layout and backing") {
  SimulationSetup s = fixture::desk_setup();
  const ThermalModel m(s.workpiece, s.grid, s.tool, MaterialSet(s.material, s.backing_material),
                       s.solver);
  const ThermalField f = m.initial_field(0.02, 0.025);
  // 5 mm over 4 cells, 10 mm backing -> 8 layers
  CHECK(f.backing_layers == 8);
  CHECK(f.nz == 12);
  CHECK(f.z_center(f.backing_layers) == doctest::Approx(0.000625));
  CHECK(std::all_of(f.temperature.begin(), f.temperature.end(),
                    [](double t) { return t == 293.15; }));
  CHECK_THROWS_AS(m.locate(f, 0.01, 0.01, 0.006), InvalidArgument);
  CHECK(f.tag[m.locate(f, 0.01, 0.01, -0.005)] == CellTag::Backing);

  s.solver.bottom = SparContact(0.02, 0.006);
  const ThermalModel spar(s.workpiece, s.grid, s.tool,
                          MaterialSet(s.material, s.backing_material), s.solver);
  const ThermalField g = spar.initial_field(0.02, 0.025);
  CHECK(g.backing_layers == 5);
  CHECK(g.tag[spar.locate(g, 0.01, 0.025, -0.003)] == CellTag::Backing);
  CHECK_THROWS_AS(spar.locate(g, 0.01, 0.002, -0.003), InvalidArgument);
  CHECK(std::count(g.tag.begin(), g.tag.end(), CellTag::Void) > 0);
}

TEST_CASE("tool source placement") {
  const SimulationSetup s = fixture::desk_setup(41.9, 0.005, {48, 30, 8});
  for (SourceMode mode : {SourceMode::SurfaceFlux, SourceMode::SurfacePlusVolumetric}) {
    SolverConfig cfg = s.solver;
    cfg.source_mode = mode;
    const ThermalModel m(s.workpiece, s.grid, s.tool, MaterialSet(s.material, s.backing_material),
                         cfg);
    const ThermalField f = m.initial_field(0.03, 0.025);
    const HeatFractions fr = heat_fractions(s.tool);
    const HeatPartition part = partition_heat(1000.0, cfg.effective_gamma());
    const SourceField src = m.tool_source(f, fr, part);
    CHECK(src.total() == doctest::Approx(1000.0).epsilon(1e-12));
    double inside_rs = 0.0;
    for (int k = 0; k < f.nz; ++k)
      for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
          const double p = src.power[f.index(i, j, k)];
          if (p == 0.0)
            continue;
          CHECK(p > 0.0);
          CHECK(f.tag[f.index(i, j, k)] == CellTag::Workpiece);
          const double r = std::hypot(f.x_center(i) - 0.03, f.y_center(j) - 0.025);
          if (r <= s.tool.shoulder_radius() + 1e-12)
            inside_rs += p;
        }
    CHECK(inside_rs == doctest::Approx(1000.0).epsilon(1e-12));
  }
  // One surface group at a time.
  const ThermalModel m(s.workpiece, s.grid, s.tool, MaterialSet(s.material, s.backing_material),
                       s.solver);
  const ThermalField f = m.initial_field(0.03, 0.025);
  const HeatPartition part = partition_heat(1000.0, 0.0);
  const double rp = s.tool.probe_radius(), rs = s.tool.shoulder_radius();
  auto where = [&](const HeatFractions &fr, auto &&allowed) {
    const SourceField src = m.tool_source(f, fr, part);
    double sum = 0.0;
    for (int k = 0; k < f.nz; ++k)
      for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i)
          if (src.power[f.index(i, j, k)] > 0.0 &&
              allowed(std::hypot(f.x_center(i) - 0.03, f.y_center(j) - 0.025), k))
            sum += src.power[f.index(i, j, k)];
    return sum;
  };
  CHECK(where({1.0, 0.0, 0.0}, [&](double r, int k) {
          return k == f.top_layer() && r >= rp && r <= rs;
        }) == doctest::Approx(1000.0));
  // probe side: ring around Rp, workpiece layers above the tip at z = 1 mm
  CHECK(where({0.0, 1.0, 0.0}, [&](double r, int k) {
          return std::abs(r - rp) <= 0.5 * f.dx && f.z_center(k) > 0.001;
        }) == doctest::Approx(1000.0));
  CHECK(where({0.0, 0.0, 1.0}, [&](double r, int k) {
          return r <= rp && f.z_center(k) < 0.001 && f.z_center(k) > 0.0;
        }) == doctest::Approx(1000.0));
}

TEST_CASE("step rejects unstable dt and conserves enthalpy") {
  const SimulationSetup s = fixture::desk_setup();
  SolverConfig cfg = s.solver;
  cfg.bottom = Adiabatic{};
  cfg.h_top = 0.0;
  cfg.h_side = 0.0;
  ThermophysicalTable mat = s.material;
  mat.emissivity = 0.0;
  const ThermalModel m(s.workpiece, s.grid, s.tool, MaterialSet(mat, s.backing_material), cfg);
  ThermalField f = m.initial_field(0.03, 0.025);
  // Non-uniform start so conduction has something to do.
  for (std::size_t c = 0; c < f.size(); ++c) {
    f.temperature[c] = 300.0 + 200.0 * std::sin(0.37 * static_cast<double>(c));
    f.enthalpy[c] = m.materials().enthalpy(f.tag[c]).enthalpy(f.temperature[c]);
  }
  const double dt = m.stable_timestep(f);
  CHECK_THROWS_AS(m.step(f, {}, 1.5 * dt), SimulationError);
  const double h0 = m.total_enthalpy(f);
  for (int n = 0; n < 500; ++n)
    m.step(f, {}, m.stable_timestep(f));
  CHECK(std::abs(m.total_enthalpy(f) - h0) <= 1e-9 * std::abs(h0));
  const auto [lo, hi] = std::minmax_element(f.temperature.begin(), f.temperature.end());
  CHECK(*lo > 100.0);
  CHECK(*hi < 500.0);
}

TEST_CASE("slab transient against series solution") {
  const fixture::Slab slab;
  const ThermalModel m = slab.model(40, 400.0, 400.0, 300.0);
  ThermalField f = m.initial_field(0.002, 0.002);
  const double t_end = 0.05 * slab.length * slab.length / slab.kappa();
  while (f.time < t_end - 1e-12)
    m.step(f, {}, std::min(m.stable_timestep(f), t_end - f.time));
  double worst = 0.0;
  for (int k = 1; k < f.nz - 1; ++k) {
    const double z = f.z_center(k);
    const double exact = oracle::slab_fourier(z, t_end, slab.length, slab.kappa(), 300.0, 400.0);
    worst = std::max(worst, std::abs(f.temperature[f.index(0, 0, k)] - exact) / 100.0);
  }
  CHECK(worst < 0.01);
}

TEST_CASE("series oracles agree") {
  const double kappa = 1e-5, l = 0.01;
  for (double t : {0.05, 0.5, 3.0})
    for (double z : {0.001, 0.005, 0.0093})
      CHECK(oracle::slab_fourier(z, t, l, kappa, 300, 400) ==
            doctest::Approx(oracle::slab_images(z, t, l, kappa, 300, 400)).epsilon(1e-9));
}

TEST_CASE("steady two-face slab is linear") {
  const fixture::Slab slab;
  const ThermalModel m = slab.model(20, 300.0, 500.0, 300.0);
  ThermalField f = m.initial_field(0.002, 0.002);
  const double t_end = 3.0 * slab.length * slab.length / slab.kappa();
  while (f.time < t_end)
    m.step(f, {}, m.stable_timestep(f));
  for (int k = 0; k < f.nz; ++k) {
    const double exact = 300.0 + 200.0 * f.z_center(k) / slab.length;
    CHECK(f.temperature[f.index(0, 0, k)] == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("weld run bookkeeping") {
  const SimulationSetup s = fixture::desk_setup();
  std::size_t calls = 0;
  RunOptions opt;
  opt.ledger_every = 20;
  opt.on_step = [&](const ThermalField &, std::size_t) { ++calls; };
  const RunHistory h = run(s, opt);
  CHECK(calls == h.steps);
  CHECK(h.times.size() == h.steps + 1);
  CHECK(h.traces.size() == 2);
  CHECK(h.times.back() == doctest::Approx(s.schedule.total_duration()).epsilon(1e-12));
  CHECK(std::is_sorted(h.times.begin(), h.times.end()));
  CHECK(std::adjacent_find(h.times.begin(), h.times.end()) == h.times.end());
  CHECK(h.final_ledger().relative_imbalance() < 1e-9);
  CHECK(h.final_ledger().flows.input > 0.0);
  CHECK(h.phases.size() == 2);
  CHECK(h.peak_temperature() > 400.0);
  CHECK(h.peak_temperature() < 855.0);
  // The far trace lags the near trace.
  CHECK(h.traces[0].back() > 293.15);

  SimulationSetup off = s;
  off.start_x = 0.005;
  CHECK_THROWS_AS(run(off), InvalidArgument);
  SimulationSetup far = s;
  far.schedule = WeldSchedule({{PhaseKind::Traverse, 100.0, 41.9, 0.005}});
  CHECK_THROWS_AS(run(far), InvalidArgument);
}

TEST_CASE("plunge ramps heat input") {
  SimulationSetup s = fixture::desk_setup();
  s.schedule = WeldSchedule({{PhaseKind::Plunge, 2.0, s.process.omega()}});
  const RunHistory ramp = run(s);
  s.schedule = WeldSchedule({{PhaseKind::Dwell, 2.0, s.process.omega()}});
  const RunHistory full = run(s);
  const double a = ramp.final_ledger().flows.input, b = full.final_ledger().flows.input;
  CHECK(a > 0.3 * b);
  CHECK(a < 0.7 * b);
}

TEST_CASE("torque heat model gives the eta M omega input") {
  SimulationSetup s = fixture::desk_setup();
  s.heat.model = HeatModel::Torque;
  s.schedule = WeldSchedule({{PhaseKind::Dwell, 1.0, s.process.omega()}});
  const RunHistory h = run(s);
  CHECK(h.final_ledger().flows.input ==
        doctest::Approx(0.95 * 40.0 * s.process.omega() * 1.0).epsilon(1e-9));
}
