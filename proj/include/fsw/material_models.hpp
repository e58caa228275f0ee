#pragma once

// Constitutive laws and temperature-dependent thermophysical properties.

#include <optional>
#include <utility>
#include <vector>

namespace fsw {

inline constexpr double gas_constant = 8.314462618; // J/(mol K)

/// Hot-working law written through the Zener-Hollomon parameter
/// Z = strain_rate * exp(Q / (R T)) = A sinh(alpha sigma)^n.
class SellarsTegartParams {
public:
  SellarsTegartParams(double a, double alpha, double n, double activation_energy,
                      double gas_constant = fsw::gas_constant);

  double a() const noexcept { return a_; }
  double alpha() const noexcept { return alpha_; }
  double n() const noexcept { return n_; }
  double activation_energy() const noexcept { return activation_energy_; }
  double gas_constant() const noexcept { return gas_constant_; }

  bool operator==(const SellarsTegartParams &) const = default;

private:
  double a_;                 // 1/s
  double alpha_;             // 1/Pa
  double n_;                 // -
  double activation_energy_; // J/mol
  double gas_constant_;      // J/(mol K)
};

double zener_hollomon(double strain_rate, double temperature, const SellarsTegartParams &params);

/// sigma = asinh((Z/A)^(1/n)) / alpha. Throws SimulationError when
/// exp(Q/RT) overflows (T too close to zero).
double sellars_tegart_flow_stress(double strain_rate, double temperature,
                                  const SellarsTegartParams &params);

class JohnsonCookParams {
public:
  JohnsonCookParams(double a, double b, double c, double n, double m, double melt_temperature,
                    double reference_temperature, double reference_strain_rate);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double n() const noexcept { return n_; }
  double m() const noexcept { return m_; }
  double melt_temperature() const noexcept { return melt_temperature_; }
  double reference_temperature() const noexcept { return reference_temperature_; }
  double reference_strain_rate() const noexcept { return reference_strain_rate_; }

  bool operator==(const JohnsonCookParams &) const = default;

private:
  double a_, b_, c_, n_, m_;
  double melt_temperature_;
  double reference_temperature_;
  double reference_strain_rate_;
};

/// (A + B eps^n)(1 + C ln(rate/rate0))(1 - T*^m), with T* clamped to [0, 1]
/// and the rate bracket clamped at 0. The result is never negative.
double johnson_cook_yield(double plastic_strain, double plastic_strain_rate, double temperature,
                          const JohnsonCookParams &params);

/// Von Mises shear yield: sigma / sqrt(3).
double yield_shear_stress(double sigma_yield);

/// Piecewise-linear table in temperature, held constant beyond the ends.
class PropertyTable {
public:
  using Knot = std::pair<double, double>; // (T in K, value)

  /// Knots must be strictly increasing in T, at least two of them, values
  /// > 0 (or >= 0 when `allow_zero`).
  explicit PropertyTable(std::vector<Knot> knots, bool allow_zero = false);

  static PropertyTable constant(double value);

  double at(double temperature) const;
  /// Largest tabulated value (the table is piecewise linear, so this bounds it).
  double max_value() const;
  /// Exact integral of the interpolant from t0 to t1.
  double integral(double t0, double t1) const;

  const std::vector<Knot> &knots() const noexcept { return knots_; }

  bool operator==(const PropertyTable &) const = default;

private:
  std::vector<Knot> knots_;
};

/// Density (constant), k(T), c_p(T), optional sigma_yield(T), emissivity.
struct ThermophysicalTable {
  ThermophysicalTable(double density, PropertyTable conductivity, PropertyTable specific_heat,
                      std::optional<PropertyTable> yield_stress, double emissivity);

  double density;
  PropertyTable conductivity;  // W/(m K)
  PropertyTable specific_heat; // J/(kg K)
  std::optional<PropertyTable> yield_stress; // Pa
  double emissivity;

  bool operator==(const ThermophysicalTable &) const = default;
};

enum class Property { Conductivity, SpecificHeat, YieldStress };

double property_at(const ThermophysicalTable &table, Property which, double temperature);

/// Volumetric enthalpy h(T) = rho * integral of c_p from the first c_p knot,
/// and its inverse. Piecewise quadratic, strictly increasing.
class EnthalpyCurve {
public:
  EnthalpyCurve(double density, const PropertyTable &specific_heat);

  double enthalpy(double temperature) const; // J/m^3
  double temperature(double enthalpy) const; // K
  double capacity(double temperature) const; // rho c_p, J/(m^3 K)

private:
  double density_;
  std::vector<PropertyTable::Knot> cp_;
  std::vector<double> h_at_knot_;
};

} // namespace fsw
