#pragma once

// Transient 3D conduction on a uniform cell-centred grid covering the
// workpiece and, depending on the bottom contact option, a backing plate or
// backing spar underneath it. Time integration is explicit (forward Euler on
// the cell enthalpy) with harmonic-mean face conductances, so the update
// conserves energy to round-off and the energy ledger closes exactly.
//
// Coordinates: x along the weld in [0, length], y across it in [0, width],
// z up, with the workpiece in [0, thickness] and the backing below z = 0.

#include "fsw/core_types.hpp"
#include "fsw/heat_generation.hpp"
#include "fsw/material_models.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fsw {

inline constexpr double stefan_boltzmann = 5.670374419e-8; // W/(m^2 K^4)

enum class CellTag : std::uint8_t { Workpiece, Backing, Void };
enum class FluxProfile { Uniform, LinearInR };
enum class SourceMode { SurfaceFlux, SurfacePlusVolumetric };

/// Outer faces of the computational box. ZMin is the bottom of the lowest
/// modelled layer, ZMax the workpiece top surface.
enum class Face { XMin, XMax, YMin, YMax, ZMin, ZMax };

struct GridResolution {
  int nx = 0; // cells along the weld
  int ny = 0; // cells across
  int nz = 0; // cells through the workpiece thickness
  bool operator==(const GridResolution &) const = default;
};

struct SolverConfig {
  double ambient = 293.15;                   // K
  std::optional<double> initial_temperature; // K, defaults to ambient
  double h_top = 10.0;                       // W/(m^2 K)
  double h_side = 10.0;                      // W/(m^2 K), lateral faces and backing exterior
  BottomContactCondition bottom = Adiabatic{};
  double backing_thickness = 0.012; // m, plate under perfect/gap contact
  FluxProfile flux_profile = FluxProfile::Uniform;
  std::optional<double> fixed_dt; // s; nullopt = automatic
  SourceMode source_mode = SourceMode::SurfaceFlux;
  std::optional<double> gamma; // volumetric share; default 0 or 1 by mode
  double taylor_quinney = default_taylor_quinney;
  /// Prescribed temperature on an outer face (fixtures, verification runs).
  std::array<std::optional<double>, 6> fixed_face_temperature{};

  void validate() const;
  double start_temperature() const { return initial_temperature.value_or(ambient); }
  double effective_gamma() const;

  bool operator==(const SolverConfig &) const = default;
};

/// Grid, per-cell state and tool pose. T and enthalpy are kept consistent by
/// ThermalModel; void cells carry the ambient temperature and zero enthalpy.
struct ThermalField {
  int nx = 0, ny = 0, nz = 0; // nz counts backing + workpiece layers
  int backing_layers = 0;
  double dx = 0, dy = 0, dz = 0;
  std::vector<double> temperature; // K
  std::vector<double> enthalpy;    // J/m^3
  std::vector<CellTag> tag;
  double time = 0.0;
  double tool_x = 0.0;
  double tool_y = 0.0;

  std::size_t size() const noexcept { return temperature.size(); }
  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(k) * ny + j) * nx + i;
  }
  double x_center(int i) const noexcept { return (i + 0.5) * dx; }
  double y_center(int j) const noexcept { return (j + 0.5) * dy; }
  double z_center(int k) const noexcept { return (k - backing_layers + 0.5) * dz; }
  int top_layer() const noexcept { return nz - 1; }
  double cell_volume() const noexcept { return dx * dy * dz; }
  double max_temperature() const;
};

/// Per-cell deposited power (W).
struct SourceField {
  std::vector<double> power;
  double total() const;
};

/// Energy (J) over some interval. Losses are positive when heat leaves.
struct EnergyFlows {
  double input = 0.0;
  double loss_top = 0.0;
  double loss_side = 0.0;
  double loss_bottom = 0.0;
  double losses() const { return loss_top + loss_side + loss_bottom; }
  EnergyFlows &operator+=(const EnergyFlows &other);
};

/// Outgoing flux on the uncovered top surface: radiation plus convection.
double top_surface_loss(double temperature, double emissivity, double ambient, double h_top);

struct InterfaceCoupling {
  enum class Kind { Insulated, Perfect, Conductance };
  Kind kind = Kind::Insulated;
  double h = 0.0; // W/(m^2 K), Conductance only
};

/// How a workpiece bottom cell exchanges heat with what is below it.
InterfaceCoupling bottom_surface_coupling(const BottomContactCondition &condition,
                                          bool under_tool, bool in_spar);

/// Flux through a finite contact conductance, positive from `temperature`
/// towards `other`.
double gap_flux(double h_gap, double temperature, double other);

/// Workpiece and backing material with precomputed enthalpy curves.
class MaterialSet {
public:
  MaterialSet(ThermophysicalTable workpiece, ThermophysicalTable backing);

  const ThermophysicalTable &table(CellTag tag) const;
  const EnthalpyCurve &enthalpy(CellTag tag) const;
  double diffusivity(CellTag tag, double temperature) const;

private:
  ThermophysicalTable workpiece_;
  ThermophysicalTable backing_;
  EnthalpyCurve workpiece_h_;
  EnthalpyCurve backing_h_;
};

class ThermalModel {
public:
  ThermalModel(WorkpieceGeometry workpiece, GridResolution resolution, ToolGeometry tool,
               MaterialSet materials, SolverConfig config);

  /// Uniform field at the configured start temperature with the tool at
  /// (tool_x, tool_y).
  ThermalField initial_field(double tool_x, double tool_y) const;

  /// Explicit stability limit: 0.9 * 0.5 / (kappa_max * sum(1/d^2)).
  double stable_timestep(const ThermalField &field) const;

  /// Rasterises the surface part of the heat onto shoulder annulus, probe
  /// side and probe tip cells (shares from `fractions`) and the volumetric
  /// part into the probe-swept cylinder. Each group is renormalised so the
  /// deposited total equals partition.surface + partition.volumetric.
  SourceField tool_source(const ThermalField &field, const HeatFractions &fractions,
                          const HeatPartition &partition) const;

  /// Advances by dt. Throws SimulationError if dt exceeds the stability
  /// limit. The tool moves by traverse_speed * dt along +x.
  EnergyFlows step(ThermalField &field, const SourceField &sources, double dt,
                   double traverse_speed = 0.0) const;

  /// Sum of cell enthalpies times volume (J), relative to each material's
  /// reference temperature.
  double total_enthalpy(const ThermalField &field) const;

  /// Mean top-surface workpiece temperature under the shoulder.
  double contact_temperature(const ThermalField &field) const;

  /// Throws InvalidArgument if the shoulder footprint leaves the plate.
  void check_footprint(double tool_x, double tool_y) const;

  /// Cell index containing a workpiece/backing point; throws if the point is
  /// outside the modelled domain or in a void cell.
  std::size_t locate(const ThermalField &field, double x, double y, double z) const;

  const WorkpieceGeometry &workpiece() const noexcept { return workpiece_; }
  const ToolGeometry &tool() const noexcept { return tool_; }
  const SolverConfig &config() const noexcept { return config_; }
  const MaterialSet &materials() const noexcept { return materials_; }
  const GridResolution &resolution() const noexcept { return resolution_; }

private:
  WorkpieceGeometry workpiece_;
  GridResolution resolution_;
  ToolGeometry tool_;
  MaterialSet materials_;
  SolverConfig config_;
};

// ---------------------------------------------------------------------------
// Full weld runs

struct Probe {
  std::string name;
  double x = 0, y = 0, z = 0; // m
  bool operator==(const Probe &) const = default;
};

enum class HeatModel { Analytical, Torque };
enum class YieldSource { Table, JohnsonCook, SellarsTegart };

/// How the tool heat is computed at solver time.
struct HeatSourceSettings {
  HeatModel model = HeatModel::Analytical;
  double delta = 0.5;
  double friction_coefficient = 0.3;
  std::optional<double> contact_pressure; // Pa; default from downward force
  YieldSource yield_source = YieldSource::Table;
  std::optional<JohnsonCookParams> johnson_cook;
  std::optional<SellarsTegartParams> sellars_tegart;
  double representative_strain = 1.0;        // for Johnson-Cook
  double representative_strain_rate = 100.0; // 1/s
  bool include_traverse_power = false;       // torque model only

  bool operator==(const HeatSourceSettings &) const = default;
};

struct SimulationSetup {
  ToolGeometry tool;
  ProcessParameters process;
  HeatSourceSettings heat;
  WorkpieceGeometry workpiece;
  ThermophysicalTable material;
  ThermophysicalTable backing_material;
  SolverConfig solver;
  GridResolution grid;
  WeldSchedule schedule;
  double start_x = 0.0; // m, initial tool x; y is the joint line
  std::vector<Probe> probes;

  ContactModel contact() const;
  bool operator==(const SimulationSetup &) const = default;
};

/// Yield stress driving the sticking branch at a given temperature.
double contact_yield_stress(const HeatSourceSettings &heat, const ThermophysicalTable &material,
                            double temperature);

/// Heat entering the workpiece for one phase at a given contact temperature,
/// before any plunge ramp.
double phase_heat_input(const SimulationSetup &setup, const WeldPhase &phase,
                        double contact_temperature);

struct LedgerEntry {
  double time = 0.0;
  EnergyFlows flows;
  double stored = 0.0; // J, change in domain enthalpy since t = 0
  double imbalance() const { return stored - (flows.input - flows.losses()); }
  /// |imbalance| over the largest of input, losses and |stored|.
  double relative_imbalance() const;
};

struct PhaseLedger {
  PhaseKind kind;
  double start = 0.0;
  double end = 0.0;
  EnergyFlows flows;
  double stored = 0.0;
};

struct RunHistory {
  std::vector<std::string> probe_names;
  std::vector<double> times;
  std::vector<std::vector<double>> traces; // traces[p][n] at times[n]
  ThermalField peak;                       // per-cell maximum over the run
  std::vector<LedgerEntry> ledger;         // periodic rows, last one is final
  std::vector<PhaseLedger> phases;
  std::size_t steps = 0;

  double peak_temperature() const { return peak.max_temperature(); }
  const LedgerEntry &final_ledger() const { return ledger.back(); }
};

struct RunOptions {
  std::size_t ledger_every = 100; // steps between ledger rows (0 = final only)
  /// Called after every step with the updated field and the step number.
  std::function<void(const ThermalField &, std::size_t)> on_step;
};

RunHistory run(const SimulationSetup &setup, const RunOptions &options = {});

} // namespace fsw
