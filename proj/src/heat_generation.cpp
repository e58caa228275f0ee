#include "fsw/heat_generation.hpp"

#include "fsw/error.hpp"
#include "fsw/log.hpp"

#include <cmath>
#include <string>

namespace fsw {

namespace {

void require(bool condition, const char *message) {
  if (!condition)
    throw InvalidArgument(message);
}

struct SurfaceFactors {
  double shoulder; // (Rs^3 - Rp^3)(1 + tan a)
  double side;     // 3 Rp^2 Hp
  double tip;      // Rp^3
  double sum() const { return shoulder + side + tip; }
};

SurfaceFactors surface_factors(const ToolGeometry &tool) {
  const double rs = tool.shoulder_radius();
  const double rp = tool.probe_radius();
  const double hp = tool.probe_height();
  return {(rs * rs * rs - rp * rp * rp) * (1.0 + std::tan(tool.cone_angle())),
          3.0 * rp * rp * hp, rp * rp * rp};
}

void check_rate_and_stress(double omega, double tau) {
  require(std::isfinite(omega) && omega >= 0.0, "heat generation: omega must be >= 0");
  require(std::isfinite(tau) && tau >= 0.0, "heat generation: contact shear must be >= 0");
}

} // namespace

double contact_state_variable(double v_workpiece, double v_tool) {
  require(v_tool > 0.0, "contact_state_variable: tool speed must be > 0");
  require(v_workpiece >= 0.0, "contact_state_variable: workpiece speed must be >= 0");
  require(v_workpiece <= v_tool, "contact_state_variable: workpiece faster than tool");
  return v_workpiece / v_tool;
}

ContactState classify_contact(double delta) {
  require(delta >= 0.0 && delta <= 1.0, "classify_contact: delta must be in [0, 1]");
  if (delta == 0.0)
    return ContactState::Sliding;
  if (delta == 1.0)
    return ContactState::Sticking;
  return ContactState::Partial;
}

HeatBreakdown surface_heat_components(const ToolGeometry &tool, double omega, double tau) {
  check_rate_and_stress(omega, tau);
  const SurfaceFactors f = surface_factors(tool);
  const double scale = 2.0 / 3.0 * pi * omega * tau;
  HeatBreakdown out{};
  out.q_shoulder = scale * f.shoulder;
  out.q_probe_side = scale * f.side;
  out.q_probe_tip = scale * f.tip;
  out.q_total = out.q_shoulder + out.q_probe_side + out.q_probe_tip;
  out.fractions = heat_fractions(tool);
  return out;
}

double total_heat(const ToolGeometry &tool, double omega, double tau) {
  check_rate_and_stress(omega, tau);
  return 2.0 / 3.0 * pi * omega * tau * surface_factors(tool).sum();
}

double total_heat_flat_shoulder(const ToolGeometry &tool, double omega, double tau) {
  check_rate_and_stress(omega, tau);
  const double rs = tool.shoulder_radius();
  const double rp = tool.probe_radius();
  return 2.0 / 3.0 * pi * omega * tau * (rs * rs * rs + 3.0 * rp * rp * tool.probe_height());
}

HeatFractions heat_fractions(const ToolGeometry &tool) {
  const SurfaceFactors f = surface_factors(tool);
  const double sum = f.sum();
  HeatFractions out{f.shoulder / sum, f.side / sum, f.tip / sum};
  // Push the rounding residue into the largest share so the three add to 1.
  out.shoulder = 1.0 - out.probe_side - out.probe_tip;
  return out;
}

double total_heat_sticking(const ToolGeometry &tool, double omega, double sigma_yield) {
  require(std::isfinite(sigma_yield) && sigma_yield >= 0.0,
          "total_heat_sticking: yield stress must be >= 0");
  return total_heat(tool, omega, sigma_yield / std::sqrt(3.0));
}

double total_heat_sliding(const ToolGeometry &tool, double omega, double mu, double pressure) {
  require(std::isfinite(mu) && mu >= 0.0, "total_heat_sliding: mu must be >= 0");
  require(std::isfinite(pressure) && pressure >= 0.0, "total_heat_sliding: pressure must be >= 0");
  return total_heat(tool, omega, mu * pressure);
}

double total_heat_mixed(const ToolGeometry &tool, double omega, double delta, double sigma_yield,
                        double mu, double pressure) {
  require(delta >= 0.0 && delta <= 1.0, "total_heat_mixed: delta must be in [0, 1]");
  const double sticking = total_heat_sticking(tool, omega, sigma_yield);
  const double sliding = total_heat_sliding(tool, omega, mu, pressure);
  return delta * sticking + (1.0 - delta) * sliding;
}

double mixed_contact_shear(double delta, double sigma_yield, double mu, double pressure) {
  require(delta >= 0.0 && delta <= 1.0, "mixed_contact_shear: delta must be in [0, 1]");
  require(sigma_yield >= 0.0 && mu >= 0.0 && pressure >= 0.0,
          "mixed_contact_shear: inputs must be >= 0");
  return delta * sigma_yield / std::sqrt(3.0) + (1.0 - delta) * mu * pressure;
}

double TorquePower::traverse_share() const noexcept {
  const double sum = rotational + traverse;
  return sum > 0.0 ? traverse / sum : 0.0;
}

TorquePower power_from_torque(double torque, double omega, double traverse_force,
                              double traverse_speed, bool include_traverse) {
  require(std::isfinite(torque) && torque >= 0.0, "power_from_torque: torque must be >= 0");
  require(std::isfinite(omega) && omega >= 0.0, "power_from_torque: omega must be >= 0");
  TorquePower out{};
  out.rotational = torque * omega;
  out.traverse = traverse_force * traverse_speed;
  out.total = include_traverse ? out.rotational + out.traverse : out.rotational;
  return out;
}

double heat_input(double power, double efficiency) {
  require(efficiency >= 0.0 && efficiency <= 1.0, "heat_input: efficiency must be in [0, 1]");
  return power * efficiency;
}

HeatPartition partition_heat(double heat, double gamma, double beta) {
  require(gamma >= 0.0 && gamma <= 1.0, "partition_heat: gamma must be in [0, 1]");
  HeatPartition out{};
  out.gamma = gamma;
  out.volumetric = gamma * heat;
  out.surface = heat - out.volumetric;
  out.beta = beta;
  return out;
}

double volumetric_dissipation_density(double sigma_eff, double strain_rate_eff, double beta) {
  require(sigma_eff >= 0.0 && strain_rate_eff >= 0.0 && beta >= 0.0,
          "volumetric_dissipation_density: inputs must be >= 0");
  if (beta < 0.8 || beta > 0.99)
    log::warn("Taylor-Quinney coefficient " + std::to_string(beta) +
              " is outside the usual range [0.8, 0.99]");
  return beta * sigma_eff * strain_rate_eff;
}

} // namespace fsw
