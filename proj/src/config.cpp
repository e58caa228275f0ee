#include "fsw/config.hpp"

#include "fsw/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fsw {

namespace {

struct UnitDef {
  std::string_view name;
  std::string_view si; // canonical unit of the dimension
  double scale;
  double offset = 0.0;
};

// Accepted units. The first entry for each dimension is its SI unit, which
// is what the serializer writes.
constexpr UnitDef units[] = {
    {"m", "m", 1.0},
    {"mm", "m", 1e-3},
    {"cm", "m", 1e-2},
    {"rad", "rad", 1.0},
    {"deg", "rad", pi / 180.0},
    {"rad/s", "rad/s", 1.0},
    {"rpm", "rad/s", 2.0 * pi / 60.0},
    {"m/s", "m/s", 1.0},
    {"mm/s", "m/s", 1e-3},
    {"mm/min", "m/s", 1e-3 / 60.0},
    {"m/min", "m/s", 1.0 / 60.0},
    {"N", "N", 1.0},
    {"kN", "N", 1e3},
    {"N*m", "N*m", 1.0},
    {"Nm", "N*m", 1.0},
    {"Pa", "Pa", 1.0},
    {"kPa", "Pa", 1e3},
    {"MPa", "Pa", 1e6},
    {"GPa", "Pa", 1e9},
    {"K", "K", 1.0},
    {"degC", "K", 1.0, 273.15},
    {"W/(m*K)", "W/(m*K)", 1.0},
    {"J/(kg*K)", "J/(kg*K)", 1.0},
    {"kg/m3", "kg/m3", 1.0},
    {"kg/m^3", "kg/m3", 1.0},
    {"W/(m2*K)", "W/(m2*K)", 1.0},
    {"W/(m^2*K)", "W/(m2*K)", 1.0},
    {"s", "s", 1.0},
    {"ms", "s", 1e-3},
    {"min", "s", 60.0},
    {"1/s", "1/s", 1.0},
    {"J/mol", "J/mol", 1.0},
    {"kJ/mol", "J/mol", 1e3},
    {"1/Pa", "1/Pa", 1.0},
    {"1/MPa", "1/Pa", 1e-6},
    {"m2/s", "m2/s", 1.0},
    {"mm2/s", "m2/s", 1e-6},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

// Full-string number parse; throws std::invalid_argument with a message.
double parse_number(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const char *begin = text.data();
  const char *end = begin + text.size();
  if (!text.empty() && *begin == '+')
    ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw std::invalid_argument("'" + std::string(text) + "' is not a number");
  return value;
}

double parse_quantity_impl(std::string_view text, std::string_view si) {
  text = trim(text);
  const auto space = text.find_first_of(" \t");
  if (space == std::string_view::npos) {
    // Distinguish a bare number (missing unit) from garbage.
    parse_number(text);
    throw std::invalid_argument("missing unit suffix on '" + std::string(text) +
                                "' (expected a unit convertible to " + std::string(si) + ")");
  }
  const double number = parse_number(text.substr(0, space));
  const std::string_view unit = trim(text.substr(space));
  for (const auto &u : units) {
    if (u.name != unit)
      continue;
    if (u.si != si)
      throw std::invalid_argument("unit '" + std::string(unit) + "' is not a " +
                                  std::string(si) + " unit");
    return number * u.scale + u.offset;
  }
  throw std::invalid_argument("unknown unit '" + std::string(unit) + "'");
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> entries;
  std::vector<std::string> order; // key order as written
};

const std::set<std::string> known_sections = {
    "tool",     "process",     "heat_source", "johnson_cook", "sellars_tegart",
    "workpiece", "material",   "backing",     "solver",       "grid",
    "schedule", "plunge",      "dwell",       "traverse",     "probes",
    "output",   "flow",        "calibration"};

class Document {
public:
  explicit Document(std::string_view text) {
    int line_no = 0;
    Section *current = nullptr;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto eol = text.find('\n', pos);
      std::string_view line =
          text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
      pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      line = trim(line);
      if (line.empty())
        continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("malformed section header", line_no);
        const std::string name(trim(line.substr(1, line.size() - 2)));
        if (!known_sections.count(name))
          throw ConfigError("unknown section [" + name + "]", line_no);
        if (find(name))
          throw ConfigError("duplicate section [" + name + "]", line_no);
        sections_.push_back({name, line_no, {}, {}});
        current = &sections_.back();
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("expected 'key = value'", line_no);
      if (!current)
        throw ConfigError("entry outside of any section", line_no);
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty())
        throw ConfigError("empty key", line_no);
      if (value.empty())
        throw ConfigError("empty value for '" + key + "'", line_no);
      if (current->entries.count(key))
        throw ConfigError("duplicate key '" + key + "' in [" + current->name + "]", line_no);
      current->entries[key] = {value, line_no, false};
      current->order.push_back(key);
    }
  }

  Section *find(const std::string &name) {
    for (auto &s : sections_)
      if (s.name == name)
        return &s;
    return nullptr;
  }

  Section &require(const std::string &name) {
    if (Section *s = find(name))
      return *s;
    throw ConfigError("missing required section [" + name + "]");
  }

  const std::vector<Section> &sections() const { return sections_; }

  void check_all_used() const {
    for (const auto &s : sections_)
      for (const auto &key : s.order)
        if (!s.entries.at(key).used)
          throw ConfigError("unknown key '" + key + "' in [" + s.name + "]",
                            s.entries.at(key).line);
  }

  // Section position in the file, for phase ordering.
  int rank(const std::string &name) const {
    for (std::size_t i = 0; i < sections_.size(); ++i)
      if (sections_[i].name == name)
        return static_cast<int>(i);
    return -1;
  }

private:
  std::vector<Section> sections_;
};

// Typed accessors on one section.
class Reader {
public:
  explicit Reader(Section &section) : s_(section) {}

  int line() const { return s_.line; }
  bool has(const std::string &key) const { return s_.entries.count(key) > 0; }
  int line_of(const std::string &key) const {
    return has(key) ? s_.entries.at(key).line : s_.line;
  }

  const Entry *raw(const std::string &key) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end())
      return nullptr;
    it->second.used = true;
    return &it->second;
  }

  const Entry &required(const std::string &key) {
    if (const Entry *e = raw(key))
      return *e;
    throw ConfigError("missing required key '" + key + "' in [" + s_.name + "]", s_.line);
  }

  template <class F> auto convert(const Entry &e, const std::string &key, F &&f) {
    try {
      return f(e.value);
    } catch (const ConfigError &) {
      throw;
    } catch (const std::exception &ex) {
      throw ConfigError("[" + s_.name + "] " + key + ": " + ex.what(), e.line);
    }
  }

  double quantity(const std::string &key, std::string_view si) {
    return convert(required(key), key,
                   [&](const std::string &v) { return parse_quantity_impl(v, si); });
  }
  std::optional<double> opt_quantity(const std::string &key, std::string_view si) {
    if (!has(key))
      return std::nullopt;
    return quantity(key, si);
  }
  double number(const std::string &key) {
    return convert(required(key), key, [](const std::string &v) { return parse_number(v); });
  }
  std::optional<double> opt_number(const std::string &key) {
    if (!has(key))
      return std::nullopt;
    return number(key);
  }
  std::string text(const std::string &key) { return required(key).value; }
  std::optional<std::string> opt_text(const std::string &key) {
    if (!has(key))
      return std::nullopt;
    return text(key);
  }
  template <class T> T choice(const std::string &key, const std::map<std::string, T> &options,
                              T fallback) {
    const Entry *e = raw(key);
    if (!e)
      return fallback;
    const auto it = options.find(e->value);
    if (it == options.end()) {
      std::string list;
      for (const auto &[name, _] : options)
        list += (list.empty() ? "" : ", ") + name;
      throw ConfigError("[" + s_.name + "] " + key + ": '" + e->value + "' is not one of " + list,
                        e->line);
    }
    return it->second;
  }
  bool flag(const std::string &key, bool fallback) {
    return choice<bool>(key, {{"true", true}, {"false", false}}, fallback);
  }
  long long integer(const std::string &key, long long fallback, long long minimum) {
    const Entry *e = raw(key);
    if (!e)
      return fallback;
    return convert(*e, key, [&](const std::string &v) {
      long long out = 0;
      const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
      if (ec != std::errc() || ptr != v.data() + v.size())
        throw std::invalid_argument("'" + v + "' is not an integer");
      if (out < minimum)
        throw std::invalid_argument("must be >= " + std::to_string(minimum));
      return out;
    });
  }
  long long required_integer(const std::string &key, long long minimum) {
    required(key);
    return integer(key, 0, minimum);
  }

  /// "T unit : value unit; ..." or a single value (constant table).
  PropertyTable table(const std::string &key, std::string_view si, bool allow_zero = false) {
    return convert(required(key), key, [&](const std::string &v) {
      if (v.find(':') == std::string::npos) {
        const double c = parse_quantity_impl(v, si);
        if (allow_zero ? c < 0.0 : c <= 0.0)
          throw std::invalid_argument("value must be positive");
        return PropertyTable({{0.0, c}, {1.0e4, c}}, allow_zero);
      }
      std::vector<PropertyTable::Knot> knots;
      for (auto item : split(v, ';')) {
        if (item.empty())
          continue;
        const auto parts = split(item, ':');
        if (parts.size() != 2)
          throw std::invalid_argument("table entries must read 'temperature : value'");
        knots.emplace_back(parse_quantity_impl(parts[0], "K"), parse_quantity_impl(parts[1], si));
      }
      return PropertyTable(std::move(knots), allow_zero);
    });
  }

  std::vector<double> lengths(std::string_view text_value, const std::string &key, int line) {
    std::vector<double> out;
    try {
      for (auto item : split(text_value, ','))
        out.push_back(parse_quantity_impl(item, "m"));
    } catch (const std::exception &ex) {
      throw ConfigError("[" + s_.name + "] " + key + ": " + ex.what(), line);
    }
    return out;
  }

  Section &section() { return s_; }

  // Runs a type constructor, reporting invariant violations against the
  // section header.
  template <class F> auto build(F &&f) {
    try {
      return f();
    } catch (const ConfigError &) {
      throw;
    } catch (const std::exception &ex) {
      throw ConfigError("[" + s_.name + "] " + ex.what(), s_.line);
    }
  }

private:
  Section &s_;
};

ThermophysicalTable read_material(Reader &r, bool with_yield, double default_density,
                                  double default_k, double default_cp) {
  const auto density = r.has("density") || with_yield
                           ? r.quantity("density", "kg/m3")
                           : default_density;
  const PropertyTable k = r.has("conductivity") || with_yield
                              ? r.table("conductivity", "W/(m*K)")
                              : PropertyTable::constant(default_k);
  const PropertyTable cp = r.has("specific_heat") || with_yield
                               ? r.table("specific_heat", "J/(kg*K)")
                               : PropertyTable::constant(default_cp);
  std::optional<PropertyTable> yield;
  if (with_yield && r.has("yield_stress"))
    yield = r.table("yield_stress", "Pa", true);
  const double emissivity = with_yield ? r.number("emissivity") : 0.0;
  return r.build([&] { return ThermophysicalTable(density, k, cp, yield, emissivity); });
}

} // namespace

double parse_quantity(std::string_view text, std::string_view si_unit) {
  try {
    return parse_quantity_impl(text, si_unit);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
}

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc())
    throw std::runtime_error("format_number: conversion failed");
  return std::string(buffer, ptr);
}

RunConfig parse_config(std::string_view text) {
  Document doc(text);

  // [tool]
  Reader tool_r(doc.require("tool"));
  const double rs = tool_r.quantity("shoulder_radius", "m");
  const double rp = tool_r.quantity("probe_radius", "m");
  const double hp = tool_r.quantity("probe_height", "m");
  const double cone = tool_r.opt_quantity("cone_angle", "rad").value_or(0.0);
  const double tilt = tool_r.opt_quantity("tilt_angle", "rad").value_or(0.0);
  const ToolGeometry tool = tool_r.build([&] { return ToolGeometry(rs, rp, hp, cone, tilt); });

  // [process]
  Reader proc_r(doc.require("process"));
  const double omega = proc_r.quantity("omega", "rad/s");
  const double v_trans = proc_r.quantity("traverse_speed", "m/s");
  const double force = proc_r.quantity("downward_force", "N");
  const auto torque = proc_r.opt_quantity("torque", "N*m");
  const auto f_trans = proc_r.opt_quantity("traverse_force", "N");
  const double eta =
      proc_r.opt_number("efficiency").value_or(ProcessParameters::default_efficiency);
  const ProcessParameters process = proc_r.build(
      [&] { return ProcessParameters(omega, v_trans, force, torque, f_trans, eta); });

  // [heat_source]
  HeatSourceSettings heat;
  std::optional<double> reference_temperature;
  {
    Reader r(doc.require("heat_source"));
    heat.model = r.choice<HeatModel>(
        "model", {{"analytical", HeatModel::Analytical}, {"torque", HeatModel::Torque}},
        HeatModel::Analytical);
    heat.delta = r.number("delta");
    heat.friction_coefficient = r.number("friction_coefficient");
    heat.contact_pressure = r.opt_quantity("contact_pressure", "Pa");
    heat.yield_source = r.choice<YieldSource>("yield_source",
                                              {{"table", YieldSource::Table},
                                               {"johnson_cook", YieldSource::JohnsonCook},
                                               {"sellars_tegart", YieldSource::SellarsTegart}},
                                              YieldSource::Table);
    heat.representative_strain = r.opt_number("representative_strain").value_or(1.0);
    heat.representative_strain_rate =
        r.opt_quantity("representative_strain_rate", "1/s").value_or(100.0);
    heat.include_traverse_power = r.flag("include_traverse_power", false);
    reference_temperature = r.opt_quantity("reference_temperature", "K");
    // Validates delta, mu and the pressure.
    r.build([&] {
      return ContactModel(heat.delta, heat.friction_coefficient,
                          heat.contact_pressure.value_or(
                              shoulder_contact_pressure(process.downward_force(), tool)));
    });
    if (heat.model == HeatModel::Torque && !process.torque())
      throw ConfigError("[heat_source] model = torque requires [process] torque", r.line());
  }
  if (Section *s = doc.find("johnson_cook")) {
    Reader r(*s);
    const double a = r.quantity("A", "Pa"), b = r.quantity("B", "Pa"), c = r.number("C"),
                 n = r.number("n"), m = r.number("m"),
                 tm = r.quantity("melt_temperature", "K"),
                 tr = r.quantity("reference_temperature", "K"),
                 e0 = r.quantity("reference_strain_rate", "1/s");
    heat.johnson_cook = r.build([&] { return JohnsonCookParams(a, b, c, n, m, tm, tr, e0); });
  }
  if (Section *s = doc.find("sellars_tegart")) {
    Reader r(*s);
    const double a = r.quantity("A", "1/s"), alpha = r.quantity("alpha", "1/Pa"),
                 n = r.number("n"), q = r.quantity("activation_energy", "J/mol");
    heat.sellars_tegart = r.build([&] { return SellarsTegartParams(a, alpha, n, q); });
  }
  if (heat.yield_source == YieldSource::JohnsonCook && !heat.johnson_cook)
    throw ConfigError("yield_source = johnson_cook requires a [johnson_cook] section");
  if (heat.yield_source == YieldSource::SellarsTegart && !heat.sellars_tegart)
    throw ConfigError("yield_source = sellars_tegart requires a [sellars_tegart] section");

  // [workpiece]
  Reader work_r(doc.require("workpiece"));
  const double length = work_r.quantity("length", "m");
  const double width = work_r.quantity("width", "m");
  const double thickness = work_r.quantity("thickness", "m");
  const double offset = work_r.opt_quantity("joint_line_offset", "m").value_or(0.0);
  const WorkpieceGeometry workpiece =
      work_r.build([&] { return WorkpieceGeometry(length, width, thickness, offset, tool); });

  // [material]
  RunConfig config{.material_name = {},
                   .setup = {.tool = tool,
                             .process = process,
                             .heat = heat,
                             .workpiece = workpiece,
                             .material = ThermophysicalTable(1.0, PropertyTable::constant(1.0),
                                                             PropertyTable::constant(1.0),
                                                             std::nullopt, 0.0),
                             .backing_material = ThermophysicalTable(
                                 1.0, PropertyTable::constant(1.0), PropertyTable::constant(1.0),
                                 std::nullopt, 0.0),
                             .solver = {},
                             .grid = {},
                             .schedule = WeldSchedule({{PhaseKind::Dwell, 1.0, 1.0}}),
                             .start_x = 0.0,
                             .probes = {}},
                   .reference_temperature = reference_temperature,
                   .output = {},
                   .flow = std::nullopt,
                   .calibration = std::nullopt};
  SimulationSetup &setup = config.setup;
  {
    Reader r(doc.require("material"));
    config.material_name = r.opt_text("name").value_or("");
    setup.material = read_material(r, true, 0, 0, 0);
    if (heat.model == HeatModel::Analytical && heat.yield_source == YieldSource::Table &&
        !setup.material.yield_stress)
      throw ConfigError("[material] yield_stress table is required by yield_source = table",
                        r.line());
  }

  // [solver]
  SolverConfig &solver = setup.solver;
  {
    Reader r(doc.require("solver"));
    solver.ambient = r.opt_quantity("ambient", "K").value_or(solver.ambient);
    solver.initial_temperature = r.opt_quantity("initial_temperature", "K");
    solver.h_top = r.opt_quantity("h_top", "W/(m2*K)").value_or(solver.h_top);
    solver.h_side = r.opt_quantity("h_side", "W/(m2*K)").value_or(solver.h_top);
    const std::string bottom = r.choice<std::string>(
        "bottom",
        {{"adiabatic", "adiabatic"}, {"perfect", "perfect"}, {"spar", "spar"}, {"gap", "gap"}},
        "adiabatic");
    solver.backing_thickness =
        r.opt_quantity("backing_thickness", "m").value_or(solver.backing_thickness);
    if (bottom == "perfect") {
      solver.bottom = PerfectContact{};
    } else if (bottom == "spar") {
      const double w =
          r.opt_quantity("spar_width", "m").value_or(2.0 * tool.shoulder_radius());
      const double h = r.opt_quantity("spar_height", "m").value_or(solver.backing_thickness);
      solver.bottom = r.build([&] { return SparContact(w, h); });
      if (w > workpiece.width())
        throw ConfigError("[solver] spar_width exceeds the workpiece width",
                          r.line_of("spar_width"));
    } else if (bottom == "gap") {
      const double h = r.opt_quantity("h_gap", "W/(m2*K)").value_or(GapConductance::default_h_gap);
      const bool perfect = r.flag("gap_perfect_under_tool", true);
      solver.bottom = r.build([&] { return GapConductance(h, perfect); });
    }
    solver.flux_profile = r.choice<FluxProfile>(
        "flux_profile", {{"uniform", FluxProfile::Uniform}, {"linear_r", FluxProfile::LinearInR}},
        FluxProfile::Uniform);
    if (const auto dt = r.opt_text("dt"); dt && *dt != "auto")
      solver.fixed_dt = r.convert(*r.raw("dt"), "dt",
                                  [](const std::string &v) { return parse_quantity_impl(v, "s"); });
    solver.source_mode = r.choice<SourceMode>(
        "source_mode",
        {{"surface", SourceMode::SurfaceFlux},
         {"surface_volumetric", SourceMode::SurfacePlusVolumetric}},
        SourceMode::SurfaceFlux);
    solver.gamma = r.opt_number("gamma");
    solver.taylor_quinney = r.opt_number("taylor_quinney").value_or(solver.taylor_quinney);
    const char *faces[] = {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
    for (std::size_t f = 0; f < 6; ++f)
      solver.fixed_face_temperature[f] =
          r.opt_quantity(std::string("fixed_temperature_") + faces[f], "K");
    r.build([&] {
      solver.validate();
      return 0;
    });
  }
  {
    Section *s = doc.find("backing");
    if (s) {
      Reader r(*s);
      setup.backing_material = read_material(r, false, 7850.0, 45.0, 480.0);
    } else {
      setup.backing_material = ThermophysicalTable(7850.0, PropertyTable::constant(45.0),
                                                   PropertyTable::constant(480.0), std::nullopt,
                                                   0.0);
    }
  }

  // [grid]
  {
    Reader r(doc.require("grid"));
    setup.grid.nx = static_cast<int>(r.required_integer("nx", 1));
    setup.grid.ny = static_cast<int>(r.required_integer("ny", 1));
    setup.grid.nz = static_cast<int>(r.required_integer("nz", 1));
  }

  // [schedule] + phase sections
  {
    Reader r(doc.require("schedule"));
    setup.start_x = r.opt_quantity("start_x", "m").value_or(2.0 * tool.shoulder_radius());
    std::vector<WeldPhase> phases;
    int last_rank = -1;
    const std::pair<const char *, PhaseKind> kinds[] = {
        {"plunge", PhaseKind::Plunge}, {"dwell", PhaseKind::Dwell}, {"traverse", PhaseKind::Traverse}};
    for (const auto &[name, kind] : kinds) {
      Section *s = doc.find(name);
      if (!s)
        continue;
      Reader p(*s);
      const int rank = doc.rank(name);
      if (rank < last_rank)
        throw ConfigError("phase sections must appear in the order plunge, dwell, traverse",
                          p.line());
      last_rank = rank;
      WeldPhase phase{kind, 0.0, p.opt_quantity("omega", "rad/s").value_or(process.omega())};
      if (kind == PhaseKind::Traverse)
        phase.traverse_speed =
            p.opt_quantity("traverse_speed", "m/s").value_or(process.traverse_speed());
      if (kind == PhaseKind::Plunge)
        phase.plunge_rate = p.opt_quantity("plunge_rate", "m/s").value_or(0.0);
      const auto duration = p.opt_quantity("duration", "s");
      const auto distance =
          kind == PhaseKind::Traverse ? p.opt_quantity("distance", "m") : std::nullopt;
      if (duration.has_value() == distance.has_value())
        throw ConfigError(std::string("[") + name + "] needs exactly one of duration" +
                              (kind == PhaseKind::Traverse ? " or distance" : ""),
                          p.line());
      if (distance) {
        if (!(phase.traverse_speed > 0.0))
          throw ConfigError("[traverse] distance needs traverse_speed > 0", p.line());
        phase.duration = *distance / phase.traverse_speed;
      } else {
        phase.duration = *duration;
      }
      phases.push_back(phase);
    }
    if (phases.empty())
      throw ConfigError("schedule needs at least one of [plunge], [dwell], [traverse]",
                        r.line());
    setup.schedule = r.build([&] { return WeldSchedule(std::move(phases)); });
    const double y = workpiece.joint_line_y();
    r.build([&] {
      auto check = [&](double x) {
        if (x - rs < 0.0 || x + rs > workpiece.length() || y - rs < 0.0 ||
            y + rs > workpiece.width())
          throw InvalidArgument("tool footprint at x = " + format_number(x) +
                                " m leaves the workpiece");
      };
      check(setup.start_x);
      check(setup.start_x + setup.schedule.traverse_distance());
      return 0;
    });
  }

  // [probes]
  if (Section *s = doc.find("probes")) {
    Reader r(*s);
    double z_min = 0.0;
    if (std::holds_alternative<PerfectContact>(solver.bottom) ||
        std::holds_alternative<GapConductance>(solver.bottom))
      z_min = -solver.backing_thickness;
    else if (const auto *spar = std::get_if<SparContact>(&solver.bottom))
      z_min = -spar->height();
    for (const auto &name : s->order) {
      const Entry &e = *r.raw(name);
      const auto xyz = r.lengths(e.value, name, e.line);
      if (xyz.size() != 3)
        throw ConfigError("[probes] " + name + ": expected 'x, y, z'", e.line);
      if (xyz[0] < 0.0 || xyz[0] > workpiece.length() || xyz[1] < 0.0 ||
          xyz[1] > workpiece.width() || xyz[2] < z_min || xyz[2] > workpiece.thickness())
        throw ConfigError("[probes] " + name + " lies outside the domain", e.line);
      setup.probes.push_back({name, xyz[0], xyz[1], xyz[2]});
    }
  }

  // [output]
  if (Section *s = doc.find("output")) {
    Reader r(*s);
    config.output.directory = r.opt_text("directory").value_or(config.output.directory);
    config.output.snapshot_every = static_cast<std::size_t>(r.integer("snapshot_every", 0, 0));
    config.output.ledger_every = static_cast<std::size_t>(r.integer("ledger_every", 100, 0));
  }

  // [flow]
  if (Section *s = doc.find("flow")) {
    Reader r(*s);
    FlowSettings flow;
    FlowFieldConfig &f = flow.field;
    f.shear_zone_radius = r.quantity("shear_zone_radius", "m");
    f.omega = r.opt_quantity("omega", "rad/s").value_or(heat.delta * process.omega());
    f.traverse_speed = r.opt_quantity("traverse_speed", "m/s").value_or(process.traverse_speed());
    f.circulation = r.opt_quantity("circulation", "m2/s").value_or(0.0);
    f.core_radius =
        r.opt_quantity("core_radius", "m").value_or(0.25 * (f.shear_zone_radius - rp));
    f.ring_radius = r.opt_quantity("ring_radius", "m").value_or(0.5 * (f.shear_zone_radius + rp));
    f.ring_depth = -r.opt_quantity("ring_depth", "m").value_or(0.5 * hp);
    r.build([&] { return FlowField(tool, f); });
    flow.t_end = r.quantity("t_end", "s");
    flow.dt = r.quantity("dt", "s");
    if (!(flow.t_end >= 0.0) || !(flow.dt > 0.0))
      throw ConfigError("[flow] needs t_end >= 0 and dt > 0", r.line());
    flow.random_seeds = static_cast<std::size_t>(r.integer("random_seeds", 0, 0));
    flow.domain_half_width =
        r.opt_quantity("domain_half_width", "m").value_or(2.0 * f.shear_zone_radius);
    flow.domain_depth = r.opt_quantity("domain_depth", "m").value_or(workpiece.thickness());
    if (const Entry *e = r.raw("seeds")) {
      for (auto item : split(e->value, ';')) {
        if (item.empty())
          continue;
        const auto xyz = r.lengths(item, "seeds", e->line);
        if (xyz.size() != 3)
          throw ConfigError("[flow] seeds: expected 'x, y, z; x, y, z; ...'", e->line);
        flow.seeds.push_back({xyz[0], xyz[1], xyz[2]});
      }
    }
    config.flow = flow;
  }

  // [calibration]
  if (Section *s = doc.find("calibration")) {
    Reader r(*s);
    CalibrationSettings cal;
    const Entry &free = r.required("free");
    for (auto name : split(free.value, ',')) {
      try {
        cal.free.push_back(default_bounds(parameter_from_name(name)));
      } catch (const std::exception &ex) {
        throw ConfigError(std::string("[calibration] free: ") + ex.what(), free.line);
      }
    }
    cal.targets = r.text("targets");
    if (const Entry *e = r.raw("weights"))
      for (auto item : split(e->value, ','))
        cal.weights.push_back(r.convert(*e, "weights", [&](const std::string &) {
          return parse_number(item);
        }));
    cal.max_evaluations = static_cast<std::size_t>(r.integer("max_evaluations", 200, 2));
    cal.coarsen = static_cast<int>(r.integer("coarsen", 1, 1));
    cal.tolerance = r.opt_number("tolerance").value_or(cal.tolerance);
    for (const auto &b : cal.free)
      if (b.which == CalibrationParameter::GapConductance &&
          !std::holds_alternative<GapConductance>(solver.bottom))
        throw ConfigError("[calibration] h_gap is free but [solver] bottom is not 'gap'",
                          free.line);
    config.calibration = cal;
  }

  doc.check_all_used();
  return config;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

// ---------------------------------------------------------------------------

namespace {

std::string q(double value, std::string_view unit) {
  return format_number(value) + " " + std::string(unit);
}

std::string table_text(const PropertyTable &t, std::string_view unit) {
  std::string out;
  for (const auto &[temp, value] : t.knots()) {
    if (!out.empty())
      out += "; ";
    out += q(temp, "K") + " : " + q(value, unit);
  }
  return out;
}

} // namespace

std::string serialize_config(const RunConfig &c) {
  const SimulationSetup &s = c.setup;
  std::ostringstream o;
  o << "# canonical SI form\n";
  o << "[tool]\n"
    << "shoulder_radius = " << q(s.tool.shoulder_radius(), "m") << "\n"
    << "probe_radius = " << q(s.tool.probe_radius(), "m") << "\n"
    << "probe_height = " << q(s.tool.probe_height(), "m") << "\n"
    << "cone_angle = " << q(s.tool.cone_angle(), "rad") << "\n"
    << "tilt_angle = " << q(s.tool.tilt_angle(), "rad") << "\n\n";

  o << "[process]\n"
    << "omega = " << q(s.process.omega(), "rad/s") << "\n"
    << "traverse_speed = " << q(s.process.traverse_speed(), "m/s") << "\n"
    << "downward_force = " << q(s.process.downward_force(), "N") << "\n";
  if (s.process.torque())
    o << "torque = " << q(*s.process.torque(), "N*m") << "\n";
  if (s.process.traverse_force())
    o << "traverse_force = " << q(*s.process.traverse_force(), "N") << "\n";
  o << "efficiency = " << format_number(s.process.efficiency()) << "\n\n";

  const HeatSourceSettings &h = s.heat;
  o << "[heat_source]\n"
    << "model = " << (h.model == HeatModel::Torque ? "torque" : "analytical") << "\n"
    << "delta = " << format_number(h.delta) << "\n"
    << "friction_coefficient = " << format_number(h.friction_coefficient) << "\n";
  if (h.contact_pressure)
    o << "contact_pressure = " << q(*h.contact_pressure, "Pa") << "\n";
  o << "yield_source = "
    << (h.yield_source == YieldSource::Table         ? "table"
        : h.yield_source == YieldSource::JohnsonCook ? "johnson_cook"
                                                     : "sellars_tegart")
    << "\n"
    << "representative_strain = " << format_number(h.representative_strain) << "\n"
    << "representative_strain_rate = " << q(h.representative_strain_rate, "1/s") << "\n"
    << "include_traverse_power = " << (h.include_traverse_power ? "true" : "false") << "\n";
  if (c.reference_temperature)
    o << "reference_temperature = " << q(*c.reference_temperature, "K") << "\n";
  o << "\n";
  if (h.johnson_cook) {
    const auto &jc = *h.johnson_cook;
    o << "[johnson_cook]\n"
      << "A = " << q(jc.a(), "Pa") << "\nB = " << q(jc.b(), "Pa")
      << "\nC = " << format_number(jc.c()) << "\nn = " << format_number(jc.n())
      << "\nm = " << format_number(jc.m())
      << "\nmelt_temperature = " << q(jc.melt_temperature(), "K")
      << "\nreference_temperature = " << q(jc.reference_temperature(), "K")
      << "\nreference_strain_rate = " << q(jc.reference_strain_rate(), "1/s") << "\n\n";
  }
  if (h.sellars_tegart) {
    const auto &st = *h.sellars_tegart;
    o << "[sellars_tegart]\n"
      << "A = " << q(st.a(), "1/s") << "\nalpha = " << q(st.alpha(), "1/Pa")
      << "\nn = " << format_number(st.n())
      << "\nactivation_energy = " << q(st.activation_energy(), "J/mol") << "\n\n";
  }

  o << "[workpiece]\n"
    << "length = " << q(s.workpiece.length(), "m") << "\n"
    << "width = " << q(s.workpiece.width(), "m") << "\n"
    << "thickness = " << q(s.workpiece.thickness(), "m") << "\n"
    << "joint_line_offset = " << q(s.workpiece.joint_line_offset(), "m") << "\n\n";

  o << "[material]\n";
  if (!c.material_name.empty())
    o << "name = " << c.material_name << "\n";
  o << "density = " << q(s.material.density, "kg/m3") << "\n"
    << "emissivity = " << format_number(s.material.emissivity) << "\n"
    << "conductivity = " << table_text(s.material.conductivity, "W/(m*K)") << "\n"
    << "specific_heat = " << table_text(s.material.specific_heat, "J/(kg*K)") << "\n";
  if (s.material.yield_stress)
    o << "yield_stress = " << table_text(*s.material.yield_stress, "Pa") << "\n";
  o << "\n";

  o << "[backing]\n"
    << "density = " << q(s.backing_material.density, "kg/m3") << "\n"
    << "conductivity = " << table_text(s.backing_material.conductivity, "W/(m*K)") << "\n"
    << "specific_heat = " << table_text(s.backing_material.specific_heat, "J/(kg*K)")
    << "\n\n";

  const SolverConfig &v = s.solver;
  o << "[solver]\n"
    << "ambient = " << q(v.ambient, "K") << "\n";
  if (v.initial_temperature)
    o << "initial_temperature = " << q(*v.initial_temperature, "K") << "\n";
  o << "h_top = " << q(v.h_top, "W/(m2*K)") << "\n"
    << "h_side = " << q(v.h_side, "W/(m2*K)") << "\n"
    << "bottom = " << bottom_condition_name(v.bottom) << "\n"
    << "backing_thickness = " << q(v.backing_thickness, "m") << "\n";
  if (const auto *spar = std::get_if<SparContact>(&v.bottom))
    o << "spar_width = " << q(spar->width(), "m") << "\n"
      << "spar_height = " << q(spar->height(), "m") << "\n";
  if (const auto *gap = std::get_if<GapConductance>(&v.bottom))
    o << "h_gap = " << q(gap->h_gap(), "W/(m2*K)") << "\n"
      << "gap_perfect_under_tool = " << (gap->perfect_under_tool() ? "true" : "false") << "\n";
  o << "flux_profile = " << (v.flux_profile == FluxProfile::Uniform ? "uniform" : "linear_r")
    << "\n"
    << "dt = " << (v.fixed_dt ? q(*v.fixed_dt, "s") : std::string("auto")) << "\n"
    << "source_mode = "
    << (v.source_mode == SourceMode::SurfaceFlux ? "surface" : "surface_volumetric") << "\n";
  if (v.gamma)
    o << "gamma = " << format_number(*v.gamma) << "\n";
  o << "taylor_quinney = " << format_number(v.taylor_quinney) << "\n";
  const char *faces[] = {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
  for (std::size_t f = 0; f < 6; ++f)
    if (v.fixed_face_temperature[f])
      o << "fixed_temperature_" << faces[f] << " = " << q(*v.fixed_face_temperature[f], "K")
        << "\n";
  o << "\n";

  o << "[grid]\nnx = " << s.grid.nx << "\nny = " << s.grid.ny << "\nnz = " << s.grid.nz
    << "\n\n";

  o << "[schedule]\nstart_x = " << q(s.start_x, "m") << "\n\n";
  for (const auto &p : s.schedule.phases()) {
    o << "[" << phase_name(p.kind) << "]\n"
      << "duration = " << q(p.duration, "s") << "\n"
      << "omega = " << q(p.omega, "rad/s") << "\n";
    if (p.kind == PhaseKind::Traverse)
      o << "traverse_speed = " << q(p.traverse_speed, "m/s") << "\n";
    if (p.kind == PhaseKind::Plunge)
      o << "plunge_rate = " << q(p.plunge_rate, "m/s") << "\n";
    o << "\n";
  }

  if (!s.probes.empty()) {
    o << "[probes]\n";
    for (const auto &p : s.probes)
      o << p.name << " = " << q(p.x, "m") << ", " << q(p.y, "m") << ", " << q(p.z, "m") << "\n";
    o << "\n";
  }

  o << "[output]\n"
    << "directory = " << c.output.directory << "\n"
    << "snapshot_every = " << c.output.snapshot_every << "\n"
    << "ledger_every = " << c.output.ledger_every << "\n\n";

  if (c.flow) {
    const FlowSettings &f = *c.flow;
    o << "[flow]\n"
      << "shear_zone_radius = " << q(f.field.shear_zone_radius, "m") << "\n"
      << "omega = " << q(f.field.omega, "rad/s") << "\n"
      << "traverse_speed = " << q(f.field.traverse_speed, "m/s") << "\n"
      << "circulation = " << q(f.field.circulation, "m2/s") << "\n"
      << "core_radius = " << q(f.field.core_radius, "m") << "\n"
      << "ring_radius = " << q(f.field.ring_radius, "m") << "\n"
      << "ring_depth = " << q(-f.field.ring_depth, "m") << "\n"
      << "t_end = " << q(f.t_end, "s") << "\n"
      << "dt = " << q(f.dt, "s") << "\n"
      << "random_seeds = " << f.random_seeds << "\n"
      << "domain_half_width = " << q(f.domain_half_width, "m") << "\n"
      << "domain_depth = " << q(f.domain_depth, "m") << "\n";
    if (!f.seeds.empty()) {
      o << "seeds = ";
      for (std::size_t n = 0; n < f.seeds.size(); ++n)
        o << (n ? "; " : "") << q(f.seeds[n][0], "m") << ", " << q(f.seeds[n][1], "m") << ", "
          << q(f.seeds[n][2], "m");
      o << "\n";
    }
    o << "\n";
  }

  if (c.calibration) {
    const CalibrationSettings &cal = *c.calibration;
    o << "[calibration]\nfree = ";
    for (std::size_t n = 0; n < cal.free.size(); ++n)
      o << (n ? ", " : "") << parameter_name(cal.free[n].which);
    o << "\ntargets = " << cal.targets << "\n";
    if (!cal.weights.empty()) {
      o << "weights = ";
      for (std::size_t n = 0; n < cal.weights.size(); ++n)
        o << (n ? ", " : "") << format_number(cal.weights[n]);
      o << "\n";
    }
    o << "max_evaluations = " << cal.max_evaluations << "\n"
      << "coarsen = " << cal.coarsen << "\n"
      << "tolerance = " << format_number(cal.tolerance) << "\n";
  }
  return o.str();
}

} // namespace fsw
