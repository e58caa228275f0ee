#pragma once

// Analytical heat generation at the tool/workpiece interface.
//
// The contact shear stress tau acts on three surfaces of the simplified
// tool: the (conical) shoulder annulus, the probe side and the probe tip.
// Integrating dQ = omega * r * tau * dA over each surface gives
//
//   Q1 = 2/3 pi omega tau (Rs^3 - Rp^3)(1 + tan a)
//   Q2 = 2   pi omega tau Rp^2 Hp
//   Q3 = 2/3 pi omega tau Rp^3
//
// and tau is either the yield shear stress (sticking), mu*p (sliding) or a
// blend weighted by the contact state variable delta.

#include "fsw/core_types.hpp"

namespace fsw {

enum class ContactState { Sliding, Partial, Sticking };

/// delta = v_workpiece / v_tool. Works equally with angular speeds at a
/// common radius.
double contact_state_variable(double v_workpiece, double v_tool);

ContactState classify_contact(double delta);

struct HeatFractions {
  double shoulder;
  double probe_side;
  double probe_tip;
};

struct HeatBreakdown {
  double q_shoulder;   // W
  double q_probe_side; // W
  double q_probe_tip;  // W
  double q_total;      // W, exactly the sum of the three
  HeatFractions fractions;
};

/// Per-surface heat for a uniform contact shear stress `tau` (Pa).
HeatBreakdown surface_heat_components(const ToolGeometry &tool, double omega, double tau);

/// Total heat from the closed form (2/3) pi omega tau * geometry_factor.
double total_heat(const ToolGeometry &tool, double omega, double tau);

/// Flat-shoulder closed form (2/3) pi omega tau (Rs^3 + 3 Rp^2 Hp). The
/// cone angle of `tool` is ignored.
double total_heat_flat_shoulder(const ToolGeometry &tool, double omega, double tau);

/// Geometry-only share of each surface in the total.
HeatFractions heat_fractions(const ToolGeometry &tool);

double total_heat_sticking(const ToolGeometry &tool, double omega, double sigma_yield);
double total_heat_sliding(const ToolGeometry &tool, double omega, double mu, double pressure);
double total_heat_mixed(const ToolGeometry &tool, double omega, double delta, double sigma_yield,
                        double mu, double pressure);

/// Effective contact shear stress delta*tau_yield + (1 - delta)*mu*p.
double mixed_contact_shear(double delta, double sigma_yield, double mu, double pressure);

struct TorquePower {
  double rotational; // M * omega
  double traverse;   // F_trans * v_trans, reported even when not included
  double total;      // rotational, plus traverse when requested
  /// traverse / (rotational + traverse); 0 when both are 0.
  double traverse_share() const noexcept;
};

TorquePower power_from_torque(double torque, double omega, double traverse_force,
                              double traverse_speed, bool include_traverse = false);

/// Heat entering the weld: Q = P * eta.
double heat_input(double power, double efficiency);

struct HeatPartition {
  double gamma;
  double volumetric; // Q_v = gamma * Q
  double surface;    // Q_s = (1 - gamma) * Q
  double beta;       // Taylor-Quinney coefficient carried along for reporting
};

inline constexpr double default_taylor_quinney = 0.9;

HeatPartition partition_heat(double heat, double gamma, double beta = default_taylor_quinney);

/// Plastic dissipation density q_v = beta * sigma_eff * strain_rate_eff
/// (W/m^3). Warns (does not throw) when beta is outside [0.8, 0.99].
double volumetric_dissipation_density(double sigma_eff, double strain_rate_eff, double beta);

} // namespace fsw
