#include "fsw/cli.hpp"

#include "fsw/config.hpp"
#include "fsw/error.hpp"
#include "fsw/io.hpp"
#include "fsw/log.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace fsw {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool verbose = false;
};

std::string fixed(double value, int precision) {
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, precision);
  if (ec != std::errc())
    return format_number(value);
  return std::string(buffer, ptr);
}

std::filesystem::path output_dir(const RunConfig &config, const Options &opt) {
  std::filesystem::path dir = opt.out.empty() ? config.output.directory : opt.out;
  std::filesystem::create_directories(dir);
  return dir;
}

// Aligned "name  value  unit" rows.
class Table {
public:
  void row(const std::string &name, const std::string &value, const std::string &unit = "") {
    rows_.push_back({name, value, unit});
  }
  std::string str() const {
    std::size_t w0 = 0, w1 = 0;
    for (const auto &r : rows_) {
      w0 = std::max(w0, r[0].size());
      w1 = std::max(w1, r[1].size());
    }
    std::ostringstream o;
    for (const auto &r : rows_) {
      o << std::left << std::setw(static_cast<int>(w0) + 2) << r[0] << std::right
        << std::setw(static_cast<int>(w1)) << r[1];
      if (!r[2].empty())
        o << "  " << r[2];
      o << '\n';
    }
    return o.str();
  }

private:
  std::vector<std::array<std::string, 3>> rows_;
};

int heatgen(const RunConfig &config, const Options &opt, std::ostream &out) {
  const SimulationSetup &s = config.setup;
  const ToolGeometry &tool = s.tool;
  const double omega = s.process.omega();
  const ContactModel contact = s.contact();
  const double t_ref = config.reference_temperature.value_or(s.solver.start_temperature());

  Table t;
  t.row("shoulder_radius", fixed(tool.shoulder_radius() * 1e3, 3), "mm");
  t.row("probe_radius", fixed(tool.probe_radius() * 1e3, 3), "mm");
  t.row("probe_height", fixed(tool.probe_height() * 1e3, 3), "mm");
  t.row("cone_angle", fixed(tool.cone_angle() * 180.0 / pi, 3), "deg");
  t.row("omega", fixed(omega, 4), "rad/s");
  t.row("delta", fixed(contact.delta(), 4));
  t.row("friction_coefficient", fixed(contact.friction_coefficient(), 4));
  t.row("contact_pressure", fixed(contact.contact_pressure() / 1e6, 4), "MPa");

  const HeatFractions f = heat_fractions(tool);
  std::optional<double> sigma;
  try {
    sigma = contact_yield_stress(s.heat, s.material, t_ref);
  } catch (const InvalidArgument &) {
    // No yield data: only the sliding and torque figures can be given.
  }
  if (sigma) {
    t.row("reference_temperature", fixed(t_ref, 2), "K");
    t.row("yield_stress", fixed(*sigma / 1e6, 4), "MPa");
    const double tau = mixed_contact_shear(contact.delta(), *sigma,
                                           contact.friction_coefficient(),
                                           contact.contact_pressure());
    t.row("contact_shear", fixed(tau / 1e6, 4), "MPa");
    const HeatBreakdown b = surface_heat_components(tool, omega, tau);
    t.row("Q1_shoulder", fixed(b.q_shoulder, 3), "W");
    t.row("Q2_probe_side", fixed(b.q_probe_side, 3), "W");
    t.row("Q3_probe_tip", fixed(b.q_probe_tip, 3), "W");
    t.row("Q_total", fixed(b.q_total, 3), "W");
  }
  t.row("fraction_shoulder", fixed(f.shoulder, 4));
  t.row("fraction_probe_side", fixed(f.probe_side, 4));
  t.row("fraction_probe_tip", fixed(f.probe_tip, 4));
  if (sigma) {
    t.row("Q_sticking", fixed(total_heat_sticking(tool, omega, *sigma), 3), "W");
    t.row("Q_sliding",
          fixed(total_heat_sliding(tool, omega, contact.friction_coefficient(),
                                   contact.contact_pressure()),
                3),
          "W");
    t.row("Q_mixed",
          fixed(total_heat_mixed(tool, omega, contact.delta(), *sigma,
                                 contact.friction_coefficient(), contact.contact_pressure()),
                3),
          "W");
  } else {
    t.row("Q_sliding",
          fixed(total_heat_sliding(tool, omega, contact.friction_coefficient(),
                                   contact.contact_pressure()),
                3),
          "W");
  }
  if (s.process.torque()) {
    const TorquePower p =
        power_from_torque(*s.process.torque(), omega, s.process.traverse_force().value_or(0.0),
                          s.process.traverse_speed(), s.heat.include_traverse_power);
    t.row("P_rotational", fixed(p.rotational, 3), "W");
    t.row("P_traverse", fixed(p.traverse, 3), "W");
    t.row("traverse_share", fixed(100.0 * p.traverse_share(), 3), "%");
    t.row("P_total", fixed(p.total, 3), "W");
    t.row("efficiency", fixed(s.process.efficiency(), 4));
    t.row("Q_torque", fixed(heat_input(p.total, s.process.efficiency()), 3), "W");
  }

  const std::string text = t.str();
  out << text;
  const auto dir = output_dir(config, opt);
  std::ofstream file(dir / "heatgen.txt", std::ios::binary);
  file << text;
  if (!file)
    throw SimulationError("cannot write heatgen.txt");
  return exit_ok;
}

int simulate(const RunConfig &config, const Options &opt, std::ostream &out) {
  const auto dir = output_dir(config, opt);
  RunOptions run_options;
  run_options.ledger_every = config.output.ledger_every;
  const std::size_t every = config.output.snapshot_every;
  if (every > 0)
    run_options.on_step = [&](const ThermalField &field, std::size_t step) {
      if (step % every != 0)
        return;
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%05zu.vtk", step / every);
      write_vtk(dir / name, vtk_grid(field, field.temperature),
                "temperature t = " + format_number(field.time) + " s");
      log::info("wrote " + std::string(name));
    };
  const RunHistory history = run(config.setup, run_options);

  write_csv(dir / "traces.csv", traces_table(history));
  write_csv(dir / "energy.csv", energy_table(history.ledger));
  write_vtk(dir / "peak.vtk", vtk_grid(history.peak, history.peak.temperature),
            "peak temperature");

  const LedgerEntry &e = history.final_ledger();
  Table t;
  t.row("steps", std::to_string(history.steps));
  t.row("end_time", fixed(e.time, 3), "s");
  t.row("peak_temperature", fixed(history.peak_temperature(), 2), "K");
  t.row("energy_input", fixed(e.flows.input, 2), "J");
  t.row("energy_stored", fixed(e.stored, 2), "J");
  t.row("energy_lost", fixed(e.flows.losses(), 2), "J");
  t.row("ledger_imbalance", format_number(e.relative_imbalance()));
  out << t.str();
  if (e.relative_imbalance() > 1e-3)
    log::warn("energy ledger imbalance " + format_number(e.relative_imbalance()) +
              " exceeds 0.1%");
  return exit_ok;
}

int flow(const RunConfig &config, const Options &opt, std::ostream &out) {
  if (!config.flow)
    throw ConfigError("flow subcommand needs a [flow] section");
  const FlowSettings &f = *config.flow;
  const FlowField field(config.setup.tool, f.field);
  const double hw = f.domain_half_width;
  const Box domain{{-hw, -hw, -f.domain_depth}, {hw, hw, 0.0}};

  std::vector<Vec3> seeds = f.seeds;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> across(-hw, hw), down(-f.domain_depth, 0.0);
  for (std::size_t n = 0; n < f.random_seeds;) {
    const Vec3 p{across(rng), across(rng), down(rng)};
    if (field.inside_probe(p))
      continue;
    seeds.push_back(p);
    ++n;
  }
  const auto paths = advect_tracers(seeds, field, f.t_end, f.dt, domain);
  const auto dir = output_dir(config, opt);
  write_csv(dir / "streamlines.csv", streamlines_table(paths));

  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto &p : paths)
    ++counts[static_cast<int>(p.status)];
  Table t;
  t.row("tracers", std::to_string(paths.size()));
  for (int s = 0; s < 4; ++s)
    t.row(std::string(tracer_status_name(static_cast<TracerStatus>(s))),
          std::to_string(counts[s]));
  out << t.str();
  for (std::size_t n = 0; n < paths.size(); ++n)
    if (paths[n].status == TracerStatus::InvalidSeed)
      log::warn("tracer " + std::to_string(n) + ": " + paths[n].error);
  return exit_ok;
}

int calibrate_cmd(const RunConfig &config, const std::filesystem::path &config_path,
                  const Options &opt, std::ostream &out) {
  if (!config.calibration)
    throw ConfigError("calibrate subcommand needs a [calibration] section");
  const CalibrationSettings &c = *config.calibration;
  std::filesystem::path targets_path = c.targets;
  if (targets_path.is_relative())
    targets_path = config_path.parent_path() / targets_path;
  std::vector<TargetTrace> targets;
  try {
    targets = read_targets(targets_path);
  } catch (const InvalidArgument &e) {
    throw ConfigError(std::string("[calibration] targets: ") + e.what());
  }
  if (!c.weights.empty()) {
    if (c.weights.size() != targets.size())
      throw ConfigError("[calibration] weights: expected one weight per target column");
    for (std::size_t n = 0; n < targets.size(); ++n)
      targets[n].weight = c.weights[n];
  }
  const CalibrationProblem problem =
      CalibrationProblem(config.setup, c.free, targets).coarsened(c.coarsen);
  CalibrationOptions options;
  options.max_evaluations = c.max_evaluations;
  options.tolerance = c.tolerance;
  options.seed = opt.seed;
  const CalibrationResult result = calibrate(problem, options);

  Table t;
  for (std::size_t n = 0; n < c.free.size(); ++n)
    t.row(std::string(parameter_name(c.free[n].which)), format_number(result.params[n]));
  t.row("objective", format_number(result.objective), "K^2");
  t.row("converged", result.converged ? "yes" : "no");
  t.row("evaluations", std::to_string(result.evaluations));
  t.row("iterations", std::to_string(result.iterations));
  t.row("spread", format_number(result.spread));
  const std::string text = t.str();
  out << text;
  const auto dir = output_dir(config, opt);
  std::ofstream report(dir / "report.txt", std::ios::binary);
  report << text;
  if (!report)
    throw SimulationError("cannot write report.txt");
  write_csv(dir / "convergence.csv", convergence_table(result, c.free));
  if (!result.converged)
    log::warn("calibration stopped at the evaluation budget before converging");
  return exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Friction stir welding thermal simulator", "fswsim"};
  app.require_subcommand(1, 1);
  Options opt;
  std::vector<CLI::App *> subs;
  const std::pair<const char *, const char *> commands[] = {
      {"heatgen", "Analytical heat generation breakdown"},
      {"simulate", "Transient weld simulation"},
      {"flow", "Material-flow tracer paths"},
      {"calibrate", "Fit contact/loss parameters to thermocouple traces"}};
  for (const auto &[name, help] : commands) {
    CLI::App *sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Run configuration file")->required();
    sub->add_option("--out", opt.out, "Output directory (overrides [output] directory)");
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_flag("--verbose", opt.verbose, "Progress messages on stderr");
    subs.push_back(sub);
  }

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end()); // CLI11 consumes from the back
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App *active = nullptr;
    for (const CLI::App *sub : subs)
      if (sub->parsed())
        active = sub;
    err << (active ? active->help() : app.help());
    return exit_usage;
  }

  auto sink_to_err = [&](const std::string &message) { err << message << '\n'; };
  log::set_warning_sink(sink_to_err);
  log::set_verbose(opt.verbose);
  struct Restore {
    ~Restore() {
      log::set_warning_sink({});
      log::set_verbose(false);
    }
  } restore;

  try {
    const RunConfig config = load_config(opt.config);
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "heatgen")
      return heatgen(config, opt, out);
    if (command == "simulate")
      return simulate(config, opt, out);
    if (command == "flow")
      return flow(config, opt, out);
    return calibrate_cmd(config, opt.config, opt, out);
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return exit_runtime;
  }
}

} // namespace fsw
