#include "fsw/thermal_solver.hpp"

#include "fsw/error.hpp"
#include "fsw/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fsw {

namespace {

void require(bool condition, const std::string &message) {
  if (!condition)
    throw InvalidArgument(message);
}

bool is_void(CellTag tag) { return tag == CellTag::Void; }

std::size_t face_index(Face face) { return static_cast<std::size_t>(face); }

int backing_layer_count(const SolverConfig &config, double dz) {
  struct Visitor {
    double dz;
    double plate;
    int operator()(const Adiabatic &) const { return 0; }
    int operator()(const PerfectContact &) const { return layers(plate); }
    int operator()(const GapConductance &) const { return layers(plate); }
    int operator()(const SparContact &spar) const { return layers(spar.height()); }
    int layers(double height) const {
      return std::max(1, static_cast<int>(std::lround(height / dz)));
    }
  };
  return std::visit(Visitor{dz, config.backing_thickness}, config.bottom);
}

} // namespace

// ---------------------------------------------------------------------------

void SolverConfig::validate() const {
  require(std::isfinite(ambient) && ambient > 0.0, "SolverConfig: ambient must be > 0 K");
  require(!initial_temperature || *initial_temperature > 0.0,
          "SolverConfig: initial temperature must be > 0 K");
  require(h_top >= 0.0 && h_side >= 0.0, "SolverConfig: film coefficients must be >= 0");
  require(backing_thickness > 0.0 && backing_thickness <= 0.060 + 1e-12,
          "SolverConfig: backing thickness must be in (0, 60 mm]");
  require(!fixed_dt || *fixed_dt > 0.0, "SolverConfig: fixed dt must be > 0");
  require(!gamma || (*gamma >= 0.0 && *gamma <= 1.0), "SolverConfig: gamma must be in [0, 1]");
  require(taylor_quinney > 0.0 && taylor_quinney <= 1.0,
          "SolverConfig: Taylor-Quinney coefficient must be in (0, 1]");
  for (const auto &fixed : fixed_face_temperature)
    require(!fixed || *fixed > 0.0, "SolverConfig: fixed face temperature must be > 0 K");
}

double SolverConfig::effective_gamma() const {
  if (gamma)
    return *gamma;
  return source_mode == SourceMode::SurfaceFlux ? 0.0 : 1.0;
}

double ThermalField::max_temperature() const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < temperature.size(); ++c)
    if (!is_void(tag[c]))
      best = std::max(best, temperature[c]);
  return best;
}

double SourceField::total() const {
  double sum = 0.0;
  for (double p : power)
    sum += p;
  return sum;
}

EnergyFlows &EnergyFlows::operator+=(const EnergyFlows &other) {
  input += other.input;
  loss_top += other.loss_top;
  loss_side += other.loss_side;
  loss_bottom += other.loss_bottom;
  return *this;
}

double top_surface_loss(double temperature, double emissivity, double ambient, double h_top) {
  const double t2 = temperature * temperature;
  const double a2 = ambient * ambient;
  return stefan_boltzmann * emissivity * (t2 * t2 - a2 * a2) + h_top * (temperature - ambient);
}

InterfaceCoupling bottom_surface_coupling(const BottomContactCondition &condition,
                                          bool under_tool, bool in_spar) {
  using Kind = InterfaceCoupling::Kind;
  struct Visitor {
    bool under_tool;
    bool in_spar;
    InterfaceCoupling operator()(const Adiabatic &) const { return {Kind::Insulated, 0.0}; }
    InterfaceCoupling operator()(const PerfectContact &) const { return {Kind::Perfect, 0.0}; }
    InterfaceCoupling operator()(const SparContact &) const {
      return in_spar ? InterfaceCoupling{Kind::Perfect, 0.0}
                     : InterfaceCoupling{Kind::Insulated, 0.0};
    }
    InterfaceCoupling operator()(const GapConductance &gap) const {
      if (under_tool && gap.perfect_under_tool())
        return {Kind::Perfect, 0.0};
      return {Kind::Conductance, gap.h_gap()};
    }
  };
  return std::visit(Visitor{under_tool, in_spar}, condition);
}

double gap_flux(double h_gap, double temperature, double other) {
  return h_gap * (temperature - other);
}

// ---------------------------------------------------------------------------

MaterialSet::MaterialSet(ThermophysicalTable workpiece, ThermophysicalTable backing)
    : workpiece_(std::move(workpiece)), backing_(std::move(backing)),
      workpiece_h_(workpiece_.density, workpiece_.specific_heat),
      backing_h_(backing_.density, backing_.specific_heat) {}

const ThermophysicalTable &MaterialSet::table(CellTag tag) const {
  return tag == CellTag::Backing ? backing_ : workpiece_;
}

const EnthalpyCurve &MaterialSet::enthalpy(CellTag tag) const {
  return tag == CellTag::Backing ? backing_h_ : workpiece_h_;
}

double MaterialSet::diffusivity(CellTag tag, double temperature) const {
  return table(tag).conductivity.at(temperature) / enthalpy(tag).capacity(temperature);
}

// ---------------------------------------------------------------------------

ThermalModel::ThermalModel(WorkpieceGeometry workpiece, GridResolution resolution,
                           ToolGeometry tool, MaterialSet materials, SolverConfig config)
    : workpiece_(std::move(workpiece)), resolution_(resolution), tool_(std::move(tool)),
      materials_(std::move(materials)), config_(std::move(config)) {
  config_.validate();
  check_tool_fits(workpiece_, tool_);
  require(resolution_.nx > 0 && resolution_.ny > 0 && resolution_.nz > 0,
          "ThermalModel: grid resolution must be positive in every axis");
  if (const auto *spar = std::get_if<SparContact>(&config_.bottom))
    require(spar->width() <= workpiece_.width(), "ThermalModel: spar wider than the workpiece");
}

ThermalField ThermalModel::initial_field(double tool_x, double tool_y) const {
  ThermalField f;
  f.nx = resolution_.nx;
  f.ny = resolution_.ny;
  f.dx = workpiece_.length() / f.nx;
  f.dy = workpiece_.width() / f.ny;
  f.dz = workpiece_.thickness() / resolution_.nz;
  f.backing_layers = backing_layer_count(config_, f.dz);
  f.nz = resolution_.nz + f.backing_layers;
  f.tool_x = tool_x;
  f.tool_y = tool_y;

  const std::size_t n = static_cast<std::size_t>(f.nx) * f.ny * f.nz;
  f.tag.assign(n, CellTag::Workpiece);
  f.temperature.assign(n, config_.start_temperature());
  f.enthalpy.assign(n, 0.0);

  // Spar rows: cells whose centre lies within half the spar width of the
  // joint line, or the nearest row when the spar is narrower than a cell.
  std::vector<bool> spar_row(f.ny, true);
  if (const auto *spar = std::get_if<SparContact>(&config_.bottom)) {
    const double yj = workpiece_.joint_line_y();
    int nearest = 0;
    bool any = false;
    for (int j = 0; j < f.ny; ++j) {
      const double d = std::abs(f.y_center(j) - yj);
      spar_row[j] = d <= 0.5 * spar->width() * (1.0 + 1e-12);
      any = any || spar_row[j];
      if (d < std::abs(f.y_center(nearest) - yj))
        nearest = j;
    }
    if (!any)
      spar_row[nearest] = true;
  }

  for (int k = 0; k < f.nz; ++k)
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        const std::size_t c = f.index(i, j, k);
        if (k < f.backing_layers)
          f.tag[c] = spar_row[j] ? CellTag::Backing : CellTag::Void;
        if (is_void(f.tag[c])) {
          f.temperature[c] = config_.ambient;
          continue;
        }
        f.enthalpy[c] = materials_.enthalpy(f.tag[c]).enthalpy(f.temperature[c]);
      }
  return f;
}

double ThermalModel::stable_timestep(const ThermalField &field) const {
  double kappa_max = 0.0;
  for (std::size_t c = 0; c < field.size(); ++c)
    if (!is_void(field.tag[c]))
      kappa_max = std::max(kappa_max, materials_.diffusivity(field.tag[c], field.temperature[c]));
  const double inv = 1.0 / (field.dx * field.dx) + 1.0 / (field.dy * field.dy) +
                     1.0 / (field.dz * field.dz);
  constexpr double safety = 0.9;
  return safety * 0.5 / (kappa_max * inv);
}

void ThermalModel::check_footprint(double tool_x, double tool_y) const {
  const double rs = tool_.shoulder_radius();
  const double slack = 1e-9 * std::max(workpiece_.length(), workpiece_.width());
  if (tool_x - rs < -slack || tool_x + rs > workpiece_.length() + slack ||
      tool_y - rs < -slack || tool_y + rs > workpiece_.width() + slack) {
    std::ostringstream msg;
    msg << "tool footprint at (" << tool_x << ", " << tool_y << ") m with shoulder radius " << rs
        << " m leaves the " << workpiece_.length() << " x " << workpiece_.width()
        << " m workpiece";
    throw InvalidArgument(msg.str());
  }
}

namespace {

struct ColumnSelection {
  std::vector<std::pair<int, int>> columns; // (i, j)
  std::vector<double> radius;
};

// Columns whose centre distance r from the tool axis satisfies `keep`; if none
// do, the columns closest to `fallback_r`.
template <class Pred>
ColumnSelection select_columns(const ThermalField &f, Pred keep, double fallback_r) {
  ColumnSelection out;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      const double r = std::hypot(f.x_center(i) - f.tool_x, f.y_center(j) - f.tool_y);
      best = std::min(best, std::abs(r - fallback_r));
      if (keep(r)) {
        out.columns.emplace_back(i, j);
        out.radius.push_back(r);
      }
    }
  if (!out.columns.empty())
    return out;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      const double r = std::hypot(f.x_center(i) - f.tool_x, f.y_center(j) - f.tool_y);
      if (std::abs(r - fallback_r) <= best * (1.0 + 1e-12) + 1e-15) {
        out.columns.emplace_back(i, j);
        out.radius.push_back(r);
      }
    }
  return out;
}

// Distributes `power` over the given cells in proportion to `weight`.
void deposit(SourceField &src, const std::vector<std::size_t> &cells,
             const std::vector<double> &weight, double power) {
  if (power == 0.0 || cells.empty())
    return;
  double sum = 0.0;
  for (double w : weight)
    sum += w;
  if (sum <= 0.0) {
    for (std::size_t c : cells)
      src.power[c] += power / static_cast<double>(cells.size());
    return;
  }
  for (std::size_t n = 0; n < cells.size(); ++n)
    src.power[cells[n]] += power * weight[n] / sum;
}

} // namespace

SourceField ThermalModel::tool_source(const ThermalField &f, const HeatFractions &fractions,
                                      const HeatPartition &partition) const {
  check_footprint(f.tool_x, f.tool_y);
  SourceField src;
  src.power.assign(f.size(), 0.0);
  if (partition.surface == 0.0 && partition.volumetric == 0.0)
    return src;

  const double rs = tool_.shoulder_radius();
  const double rp = tool_.probe_radius();
  const double hp = tool_.probe_height();
  const int top = f.top_layer();
  const int first_work = f.backing_layers;
  const bool linear = config_.flux_profile == FluxProfile::LinearInR;
  const double ring_half = 0.5 * std::max(f.dx, f.dy);

  // Workpiece layers whose centre lies above the probe tip (at least one).
  std::vector<int> probe_layers;
  for (int k = top; k >= first_work; --k)
    if (workpiece_.thickness() - f.z_center(k) < hp || probe_layers.empty())
      probe_layers.push_back(k);
  // Layer just below the probe tip face.
  const int tip_layer =
      std::max(first_work, top - static_cast<int>(std::floor(hp / f.dz * (1.0 + 1e-12))));

  std::vector<std::size_t> cells;
  std::vector<double> weight;

  // Shoulder annulus on the top surface.
  {
    const auto sel = select_columns(
        f, [&](double r) { return r >= rp && r <= rs; }, 0.5 * (rs + rp));
    cells.clear();
    weight.clear();
    for (std::size_t n = 0; n < sel.columns.size(); ++n) {
      cells.push_back(f.index(sel.columns[n].first, sel.columns[n].second, top));
      weight.push_back(linear ? sel.radius[n] : 1.0);
    }
    deposit(src, cells, weight, partition.surface * fractions.shoulder);
  }
  // Probe side: ring of columns around r = Rp over the probe depth.
  {
    const auto sel = select_columns(
        f, [&](double r) { return std::abs(r - rp) <= ring_half; }, rp);
    cells.clear();
    weight.clear();
    for (const auto &[i, j] : sel.columns)
      for (int k : probe_layers) {
        cells.push_back(f.index(i, j, k));
        weight.push_back(1.0);
      }
    deposit(src, cells, weight, partition.surface * fractions.probe_side);
  }
  // Probe tip disc, and the probe-swept cylinder for the volumetric share.
  {
    const auto sel = select_columns(f, [&](double r) { return r <= rp; }, 0.0);
    cells.clear();
    weight.clear();
    for (std::size_t n = 0; n < sel.columns.size(); ++n) {
      cells.push_back(f.index(sel.columns[n].first, sel.columns[n].second, tip_layer));
      weight.push_back(linear ? sel.radius[n] : 1.0);
    }
    deposit(src, cells, weight, partition.surface * fractions.probe_tip);

    cells.clear();
    weight.clear();
    for (const auto &[i, j] : sel.columns)
      for (int k : probe_layers) {
        cells.push_back(f.index(i, j, k));
        weight.push_back(1.0);
      }
    deposit(src, cells, weight, partition.volumetric);
  }
  return src;
}

EnergyFlows ThermalModel::step(ThermalField &f, const SourceField &sources, double dt,
                               double traverse_speed) const {
  if (!(dt > 0.0))
    throw SimulationError("time step must be > 0");
  const double limit = stable_timestep(f);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time step " << dt << " s exceeds the stability limit " << limit << " s";
    throw SimulationError(msg.str());
  }
  require(sources.power.empty() || sources.power.size() == f.size(),
          "ThermalModel::step: source field does not match the grid");

  const std::size_t n = f.size();
  std::vector<double> k(n, 0.0);
  for (std::size_t c = 0; c < n; ++c)
    if (!is_void(f.tag[c]))
      k[c] = materials_.table(f.tag[c]).conductivity.at(f.temperature[c]);

  const double ax = f.dy * f.dz; // area of an x-normal face
  const double ay = f.dx * f.dz;
  const double az = f.dx * f.dy;
  const double ta = config_.ambient;
  const double h_side = config_.h_side;
  const double rs = tool_.shoulder_radius();
  const auto &fixed = config_.fixed_face_temperature;
  const double emissivity = materials_.table(CellTag::Workpiece).emissivity;

  std::vector<double> dh(n, 0.0); // J gained over the step
  EnergyFlows flows;

  auto couple = [&](std::size_t a, std::size_t b, double conductance) {
    const double q = conductance * (f.temperature[b] - f.temperature[a]) * dt;
    dh[a] += q;
    dh[b] -= q;
  };
  auto series = [](double d, double ka, double kb) { return 0.5 * d / ka + 0.5 * d / kb; };
  // Heat leaving cell c through an outer or void-facing face (positive out).
  auto convect = [&](std::size_t c, double area) {
    const double q = h_side * area * (f.temperature[c] - ta) * dt;
    dh[c] -= q;
    return q;
  };
  auto clamp_face = [&](std::size_t c, double area, double half_gap, double t_face) {
    const double q = k[c] * area / half_gap * (f.temperature[c] - t_face) * dt;
    dh[c] -= q;
    return q;
  };
  auto under_shoulder = [&](int i, int j) {
    return std::hypot(f.x_center(i) - f.tool_x, f.y_center(j) - f.tool_y) <= rs;
  };

  for (int kk = 0; kk < f.nz; ++kk)
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        const std::size_t c = f.index(i, j, kk);
        const bool c_void = is_void(f.tag[c]);

        // +x face
        if (i + 1 < f.nx) {
          const std::size_t e = f.index(i + 1, j, kk);
          const bool e_void = is_void(f.tag[e]);
          if (!c_void && !e_void)
            couple(c, e, ax / series(f.dx, k[c], k[e]));
          else if (!c_void)
            flows.loss_side += convect(c, ax);
          else if (!e_void)
            flows.loss_side += convect(e, ax);
        }
        // +y face
        if (j + 1 < f.ny) {
          const std::size_t e = f.index(i, j + 1, kk);
          const bool e_void = is_void(f.tag[e]);
          if (!c_void && !e_void)
            couple(c, e, ay / series(f.dy, k[c], k[e]));
          else if (!c_void)
            flows.loss_side += convect(c, ay);
          else if (!e_void)
            flows.loss_side += convect(e, ay);
        }
        // +z face. A workpiece cell above a void cell is insulated.
        if (kk + 1 < f.nz && !c_void) {
          const std::size_t e = f.index(i, j, kk + 1);
          if (kk + 1 == f.backing_layers) {
            const auto coupling =
                bottom_surface_coupling(config_.bottom, under_shoulder(i, j), true);
            if (coupling.kind == InterfaceCoupling::Kind::Perfect)
              couple(c, e, az / series(f.dz, k[c], k[e]));
            else if (coupling.kind == InterfaceCoupling::Kind::Conductance)
              couple(c, e, az / (series(f.dz, k[c], k[e]) + 1.0 / coupling.h));
          } else {
            couple(c, e, az / series(f.dz, k[c], k[e]));
          }
        }
      }

  // Outer faces.
  auto side_face = [&](Face face, std::size_t c, double area, double spacing) {
    if (is_void(f.tag[c]))
      return;
    if (const auto &t = fixed[face_index(face)])
      flows.loss_side += clamp_face(c, area, 0.5 * spacing, *t);
    else
      flows.loss_side += convect(c, area);
  };
  for (int kk = 0; kk < f.nz; ++kk)
    for (int j = 0; j < f.ny; ++j) {
      side_face(Face::XMin, f.index(0, j, kk), ax, f.dx);
      side_face(Face::XMax, f.index(f.nx - 1, j, kk), ax, f.dx);
    }
  for (int kk = 0; kk < f.nz; ++kk)
    for (int i = 0; i < f.nx; ++i) {
      side_face(Face::YMin, f.index(i, 0, kk), ay, f.dy);
      side_face(Face::YMax, f.index(i, f.ny - 1, kk), ay, f.dy);
    }
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      const std::size_t top = f.index(i, j, f.top_layer());
      if (const auto &t = fixed[face_index(Face::ZMax)]) {
        flows.loss_top += clamp_face(top, az, 0.5 * f.dz, *t);
      } else if (!under_shoulder(i, j)) {
        const double q =
            top_surface_loss(f.temperature[top], emissivity, ta, config_.h_top) * az * dt;
        dh[top] -= q;
        flows.loss_top += q;
      }

      const std::size_t bottom = f.index(i, j, 0);
      if (is_void(f.tag[bottom]))
        continue;
      if (const auto &t = fixed[face_index(Face::ZMin)])
        flows.loss_bottom += clamp_face(bottom, az, 0.5 * f.dz, *t);
      else if (f.tag[bottom] == CellTag::Backing)
        flows.loss_bottom += convect(bottom, az);
    }

  if (!sources.power.empty())
    for (std::size_t c = 0; c < n; ++c)
      if (sources.power[c] != 0.0) {
        const double q = sources.power[c] * dt;
        dh[c] += q;
        flows.input += q;
      }

  const double inv_volume = 1.0 / f.cell_volume();
  for (std::size_t c = 0; c < n; ++c) {
    if (is_void(f.tag[c]))
      continue;
    f.enthalpy[c] += dh[c] * inv_volume;
    f.temperature[c] = materials_.enthalpy(f.tag[c]).temperature(f.enthalpy[c]);
    if (!(f.temperature[c] > 0.0)) {
      std::ostringstream msg;
      msg << "temperature dropped to " << f.temperature[c] << " K in cell " << c;
      throw SimulationError(msg.str());
    }
  }
  f.time += dt;
  f.tool_x += traverse_speed * dt;
  return flows;
}

double ThermalModel::total_enthalpy(const ThermalField &f) const {
  double sum = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c)
    if (!is_void(f.tag[c]))
      sum += f.enthalpy[c];
  return sum * f.cell_volume();
}

double ThermalModel::contact_temperature(const ThermalField &f) const {
  const auto sel = select_columns(
      f, [&](double r) { return r <= tool_.shoulder_radius(); }, 0.0);
  double sum = 0.0;
  for (const auto &[i, j] : sel.columns)
    sum += f.temperature[f.index(i, j, f.top_layer())];
  return sum / static_cast<double>(sel.columns.size());
}

std::size_t ThermalModel::locate(const ThermalField &f, double x, double y, double z) const {
  const double z_min = -f.backing_layers * f.dz;
  const double eps = 1e-9 * std::max({workpiece_.length(), workpiece_.width(), f.dz});
  if (x < -eps || x > workpiece_.length() + eps || y < -eps || y > workpiece_.width() + eps ||
      z < z_min - eps || z > workpiece_.thickness() + eps) {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ", " << z << ") m is outside the modelled domain";
    throw InvalidArgument(msg.str());
  }
  const int i = std::clamp(static_cast<int>(std::floor(x / f.dx)), 0, f.nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor(y / f.dy)), 0, f.ny - 1);
  const int k = std::clamp(static_cast<int>(std::floor((z - z_min) / f.dz)), 0, f.nz - 1);
  const std::size_t c = f.index(i, j, k);
  if (is_void(f.tag[c])) {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ", " << z << ") m lies outside the backing spar";
    throw InvalidArgument(msg.str());
  }
  return c;
}

// ---------------------------------------------------------------------------

ContactModel SimulationSetup::contact() const {
  const double p = heat.contact_pressure.value_or(
      shoulder_contact_pressure(process.downward_force(), tool));
  return ContactModel(heat.delta, heat.friction_coefficient, p);
}

double contact_yield_stress(const HeatSourceSettings &heat, const ThermophysicalTable &material,
                            double temperature) {
  switch (heat.yield_source) {
  case YieldSource::Table:
    return property_at(material, Property::YieldStress, temperature);
  case YieldSource::JohnsonCook:
    if (!heat.johnson_cook)
      throw InvalidArgument("Johnson-Cook yield source selected without parameters");
    return johnson_cook_yield(heat.representative_strain, heat.representative_strain_rate,
                              temperature, *heat.johnson_cook);
  case YieldSource::SellarsTegart:
    if (!heat.sellars_tegart)
      throw InvalidArgument("Sellars-Tegart yield source selected without parameters");
    return sellars_tegart_flow_stress(heat.representative_strain_rate, temperature,
                                      *heat.sellars_tegart);
  }
  throw InvalidArgument("unknown yield source");
}

double phase_heat_input(const SimulationSetup &setup, const WeldPhase &phase,
                        double contact_temperature) {
  const double eta = setup.process.efficiency();
  if (phase.omega == 0.0)
    return 0.0;
  if (setup.heat.model == HeatModel::Torque) {
    if (!setup.process.torque())
      throw InvalidArgument("torque heat model selected but no torque given");
    const TorquePower power =
        power_from_torque(*setup.process.torque(), phase.omega,
                          setup.process.traverse_force().value_or(0.0), phase.traverse_speed,
                          setup.heat.include_traverse_power);
    return heat_input(power.total, eta);
  }
  const ContactModel contact = setup.contact();
  const double sigma = contact_yield_stress(setup.heat, setup.material, contact_temperature);
  const double q = total_heat_mixed(setup.tool, phase.omega, contact.delta(), sigma,
                                    contact.friction_coefficient(), contact.contact_pressure());
  return heat_input(q, eta);
}

double LedgerEntry::relative_imbalance() const {
  const double scale = std::max({std::abs(flows.input), std::abs(flows.losses()),
                                 std::abs(flows.loss_top) + std::abs(flows.loss_side) +
                                     std::abs(flows.loss_bottom),
                                 std::abs(stored)});
  return scale > 0.0 ? std::abs(imbalance()) / scale : 0.0;
}

RunHistory run(const SimulationSetup &setup, const RunOptions &options) {
  const ThermalModel model(setup.workpiece, setup.grid, setup.tool,
                           MaterialSet(setup.material, setup.backing_material), setup.solver);
  const double tool_y = setup.workpiece.joint_line_y();
  model.check_footprint(setup.start_x, tool_y);
  model.check_footprint(setup.start_x + setup.schedule.traverse_distance(), tool_y);

  ThermalField field = model.initial_field(setup.start_x, tool_y);
  const double h0 = model.total_enthalpy(field);
  const HeatFractions fractions = heat_fractions(setup.tool);
  const double gamma = setup.solver.effective_gamma();

  std::vector<std::size_t> probe_cells;
  RunHistory history;
  for (const auto &probe : setup.probes) {
    probe_cells.push_back(model.locate(field, probe.x, probe.y, probe.z));
    history.probe_names.push_back(probe.name);
  }
  history.traces.resize(setup.probes.size());
  auto record = [&] {
    history.times.push_back(field.time);
    for (std::size_t p = 0; p < probe_cells.size(); ++p)
      history.traces[p].push_back(field.temperature[probe_cells[p]]);
  };
  record();
  history.peak = field;

  EnergyFlows cumulative;
  auto ledger_row = [&] {
    LedgerEntry row;
    row.time = field.time;
    row.flows = cumulative;
    row.stored = model.total_enthalpy(field) - h0;
    history.ledger.push_back(row);
  };

  SourceField none;
  for (const auto &phase : setup.schedule.phases()) {
    const double t0 = field.time;
    const double t_end = t0 + phase.duration;
    const double h_phase = model.total_enthalpy(field);
    PhaseLedger phase_ledger{phase.kind, t0, t_end, {}, 0.0};

    bool last = false;
    while (!last) {
      try {
        const double limit = model.stable_timestep(field);
        double dt = setup.solver.fixed_dt.value_or(limit);
        if (dt > limit * (1.0 + 1e-12)) {
          std::ostringstream msg;
          msg << "fixed time step " << dt << " s exceeds the stability limit " << limit << " s";
          throw SimulationError(msg.str());
        }
        const double remaining = t_end - field.time;
        if (dt >= remaining * (1.0 - 1e-9)) {
          dt = remaining;
          last = true;
        }
        const double t_mid = field.time + 0.5 * dt;
        double q = phase_heat_input(setup, phase, model.contact_temperature(field));
        if (phase.kind == PhaseKind::Plunge)
          q *= std::clamp((t_mid - t0) / phase.duration, 0.0, 1.0);

        EnergyFlows flows;
        if (q > 0.0) {
          const HeatPartition part = partition_heat(q, gamma, setup.solver.taylor_quinney);
          flows = model.step(field, model.tool_source(field, fractions, part), dt,
                             phase.traverse_speed);
        } else {
          flows = model.step(field, none, dt, phase.traverse_speed);
        }
        if (last)
          field.time = t_end;
        cumulative += flows;
        phase_ledger.flows += flows;
      } catch (const std::exception &e) {
        std::ostringstream msg;
        msg << phase_name(phase.kind) << " phase, t = " << field.time << " s: " << e.what();
        throw SimulationError(msg.str());
      }

      ++history.steps;
      for (std::size_t c = 0; c < field.size(); ++c)
        history.peak.temperature[c] = std::max(history.peak.temperature[c], field.temperature[c]);
      record();
      if (options.ledger_every > 0 && history.steps % options.ledger_every == 0)
        ledger_row();
      if (options.on_step)
        options.on_step(field, history.steps);
    }
    phase_ledger.stored = model.total_enthalpy(field) - h_phase;
    history.phases.push_back(phase_ledger);
    log::info(std::string(phase_name(phase.kind)) + " phase done at t = " +
              std::to_string(field.time) + " s, max T = " +
              std::to_string(field.max_temperature()) + " K");
  }
  if (history.ledger.empty() || history.ledger.back().time != field.time)
    ledger_row();
  history.peak.time = field.time;
  history.peak.tool_x = field.tool_x;
  return history;
}

} // namespace fsw
