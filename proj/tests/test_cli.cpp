#include "doctest.h"

#include "fsw/cli.hpp"
#include "fsw/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fsw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Result {
  int status;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fswsim");
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

fs::path workdir() {
  const auto dir = fs::temp_directory_path() / "fsw_test_cli";
  fs::create_directories(dir);
  return dir;
}

// The shipped example on a coarser grid and a shorter traverse.
fs::path small_config() {
  std::string text = slurp(FSW_DATA_DIR "/example_weld.cfg");
  auto set = [&](const std::string &from, const std::string &to) {
    text.replace(text.find(from), from.size(), to);
  };
  set("nx = 60", "nx = 24");
  set("ny = 30", "ny = 12");
  set("nz = 5", "nz = 3");
  set("distance = 70 mm", "distance = 20 mm");
  set("snapshot_every = 500", "snapshot_every = 100");
  const auto path = workdir() / "small.cfg";
  std::ofstream(path) << text;
  return path;
}

} // namespace

TEST_CASE("missing --config is a usage error") {
  const Result r = cli({"simulate"});
  CHECK(r.status == 1);
  CHECK(r.err.find("--config") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(cli({}).status == 1);
  CHECK(cli({"explode", "--config", "x"}).status == 1);
}

TEST_CASE("config problems exit with status 2") {
  const Result r = cli({"heatgen", "--config", (workdir() / "absent.cfg").string()});
  CHECK(r.status == 2);
  CHECK_FALSE(r.err.empty());
  const auto bad = workdir() / "bad.cfg";
  std::ofstream(bad) << "[tool]\nshoulder_radius = 9\n";
  CHECK(cli({"heatgen", "--config", bad.string()}).status == 2);
}

TEST_CASE("heatgen prints the paper tool fractions") {
  const auto out = workdir() / "heatgen";
  const Result r = cli({"heatgen", "--config", FSW_DATA_DIR "/example_weld.cfg", "--out", out.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("fraction_shoulder         0.8595") != std::string::npos);
  CHECK(r.out.find("fraction_probe_side       0.1124") != std::string::npos);
  CHECK(r.out.find("fraction_probe_tip        0.0281") != std::string::npos);
  CHECK(r.out.find("Q_torque") != std::string::npos);
  CHECK(slurp(out / "heatgen.txt") == r.out);
}

TEST_CASE("simulate writes readable, deterministic outputs") {
  const auto cfg = small_config();
  const auto a = workdir() / "sim_a", b = workdir() / "sim_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", a.string()}).status == 0);
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", b.string()}).status == 0);

  const CsvTable traces = read_csv(a / "traces.csv");
  CHECK(traces.header ==
        std::vector<std::string>{"time_s", "tc_advancing_K", "tc_retreating_K", "tc_bottom_K"});
  const auto t = traces.values(0);
  CHECK(std::adjacent_find(t.begin(), t.end(), std::greater_equal<>()) == t.end());

  const CsvTable energy = read_csv(a / "energy.csv");
  CHECK(energy.values(energy.column("imbalance_rel")).back() < 1e-3);

  const VtkGrid peak = read_vtk(a / "peak.vtk");
  CHECK(peak.nx == 24);
  CHECK(*std::max_element(peak.temperature.begin(), peak.temperature.end()) > 400.0);
  CHECK(fs::exists(a / "snapshot_00001.vtk"));
  CHECK_NOTHROW(read_vtk(a / "snapshot_00001.vtk"));

  for (const char *name : {"traces.csv", "energy.csv", "peak.vtk"})
    CHECK(slurp(a / name) == slurp(b / name));
}

TEST_CASE("flow tracers are seeded deterministically") {
  const auto cfg = small_config();
  const auto a = workdir() / "flow_a", b = workdir() / "flow_b", c = workdir() / "flow_c";
  REQUIRE(cli({"flow", "--config", cfg.string(), "--out", a.string(), "--seed", "7"}).status == 0);
  REQUIRE(cli({"flow", "--config", cfg.string(), "--out", b.string(), "--seed", "7"}).status == 0);
  REQUIRE(cli({"flow", "--config", cfg.string(), "--out", c.string(), "--seed", "8"}).status == 0);
  CHECK(slurp(a / "streamlines.csv") == slurp(b / "streamlines.csv"));
  CHECK(slurp(a / "streamlines.csv") != slurp(c / "streamlines.csv"));
  const CsvTable s = read_csv(a / "streamlines.csv");
  CHECK(s.header == std::vector<std::string>{"tracer_id", "step", "x", "y", "z"});
  CHECK(s.rows.size() > 12);
}

TEST_CASE("solver failures exit with status 3") {
  std::string text = slurp(small_config());
  text.replace(text.find("dt = auto"), 9, "dt = 1 s");
  const auto path = workdir() / "unstable.cfg";
  std::ofstream(path) << text;
  const Result r = cli({"simulate", "--config", path.string(), "--out", (workdir() / "x").string()});
  CHECK(r.status == 3);
  CHECK(r.err.find("stability") != std::string::npos);
}

TEST_CASE("calibrate writes a report and convergence table") {
  const auto cfg_dir = workdir() / "cal";
  fs::create_directories(cfg_dir);
  // Targets generated by simulating the same coarse config.
  const auto sim = cfg_dir / "sim";
  REQUIRE(cli({"simulate", "--config", small_config().string(), "--out", sim.string()}).status == 0);
  fs::copy_file(sim / "traces.csv", cfg_dir / "targets.csv", fs::copy_options::overwrite_existing);
  std::string text = slurp(small_config());
  text += "\n[calibration]\nfree = delta\ntargets = targets.csv\nmax_evaluations = 12\n";
  std::ofstream(cfg_dir / "cal.cfg") << text;
  const auto out = cfg_dir / "out";
  const Result r = cli({"calibrate", "--config", (cfg_dir / "cal.cfg").string(), "--out", out.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("delta") != std::string::npos);
  CHECK(fs::exists(out / "report.txt"));
  const CsvTable conv = read_csv(out / "convergence.csv");
  CHECK(conv.header.back() == "delta");
  CHECK_FALSE(conv.rows.empty());
}
