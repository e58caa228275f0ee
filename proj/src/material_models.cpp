#include "fsw/material_models.hpp"

#include "fsw/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fsw {

namespace {

void require(bool condition, const char *message) {
  if (!condition)
    throw InvalidArgument(message);
}

} // namespace

SellarsTegartParams::SellarsTegartParams(double a, double alpha, double n,
                                         double activation_energy, double gas_constant)
    : a_(a), alpha_(alpha), n_(n), activation_energy_(activation_energy),
      gas_constant_(gas_constant) {
  require(a > 0.0 && std::isfinite(a), "SellarsTegartParams: A must be > 0");
  require(alpha > 0.0 && std::isfinite(alpha), "SellarsTegartParams: alpha must be > 0");
  require(n > 0.0 && std::isfinite(n), "SellarsTegartParams: n must be > 0");
  require(activation_energy > 0.0 && std::isfinite(activation_energy),
          "SellarsTegartParams: activation energy must be > 0");
  require(gas_constant > 0.0, "SellarsTegartParams: gas constant must be > 0");
}

double zener_hollomon(double strain_rate, double temperature, const SellarsTegartParams &params) {
  require(strain_rate > 0.0, "zener_hollomon: strain rate must be > 0");
  require(temperature > 0.0, "zener_hollomon: temperature must be > 0");
  const double arrhenius =
      std::exp(params.activation_energy() / (params.gas_constant() * temperature));
  const double z = strain_rate * arrhenius;
  if (!std::isfinite(z)) {
    std::ostringstream msg;
    msg << "Zener-Hollomon parameter overflows at T = " << temperature
        << " K (Q/RT = " << params.activation_energy() / (params.gas_constant() * temperature)
        << ")";
    throw SimulationError(msg.str());
  }
  return z;
}

double sellars_tegart_flow_stress(double strain_rate, double temperature,
                                  const SellarsTegartParams &params) {
  const double z = zener_hollomon(strain_rate, temperature, params);
  return std::asinh(std::pow(z / params.a(), 1.0 / params.n())) / params.alpha();
}

JohnsonCookParams::JohnsonCookParams(double a, double b, double c, double n, double m,
                                     double melt_temperature, double reference_temperature,
                                     double reference_strain_rate)
    : a_(a), b_(b), c_(c), n_(n), m_(m), melt_temperature_(melt_temperature),
      reference_temperature_(reference_temperature),
      reference_strain_rate_(reference_strain_rate) {
  require(a >= 0.0, "JohnsonCookParams: A must be >= 0");
  require(b >= 0.0, "JohnsonCookParams: B must be >= 0");
  require(c >= 0.0, "JohnsonCookParams: C must be >= 0");
  require(n > 0.0, "JohnsonCookParams: n must be > 0");
  require(m > 0.0, "JohnsonCookParams: m must be > 0");
  require(melt_temperature > reference_temperature,
          "JohnsonCookParams: melt temperature must exceed reference temperature");
  require(reference_strain_rate > 0.0, "JohnsonCookParams: reference strain rate must be > 0");
}

double johnson_cook_yield(double plastic_strain, double plastic_strain_rate, double temperature,
                          const JohnsonCookParams &p) {
  require(plastic_strain >= 0.0, "johnson_cook_yield: plastic strain must be >= 0");
  require(plastic_strain_rate > 0.0, "johnson_cook_yield: plastic strain rate must be > 0");

  const double hardening = p.a() + p.b() * std::pow(plastic_strain, p.n());
  const double rate =
      std::max(0.0, 1.0 + p.c() * std::log(plastic_strain_rate / p.reference_strain_rate()));
  const double homologous =
      std::clamp((temperature - p.reference_temperature()) /
                     (p.melt_temperature() - p.reference_temperature()),
                 0.0, 1.0);
  const double thermal = 1.0 - std::pow(homologous, p.m());
  return std::max(0.0, hardening * rate * thermal);
}

double yield_shear_stress(double sigma_yield) {
  require(sigma_yield >= 0.0, "yield_shear_stress: yield stress must be >= 0");
  return sigma_yield / std::sqrt(3.0);
}

PropertyTable::PropertyTable(std::vector<Knot> knots, bool allow_zero) : knots_(std::move(knots)) {
  require(knots_.size() >= 2, "PropertyTable: at least two entries required");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    const auto [t, v] = knots_[i];
    require(std::isfinite(t) && std::isfinite(v), "PropertyTable: non-finite entry");
    require(allow_zero ? v >= 0.0 : v > 0.0, "PropertyTable: values must be positive");
    if (i > 0)
      require(t > knots_[i - 1].first, "PropertyTable: temperatures must be strictly increasing");
  }
}

PropertyTable PropertyTable::constant(double value) {
  return PropertyTable({{0.0, value}, {1.0e4, value}});
}

double PropertyTable::at(double temperature) const {
  if (temperature <= knots_.front().first)
    return knots_.front().second;
  if (temperature >= knots_.back().first)
    return knots_.back().second;
  const auto upper = std::upper_bound(knots_.begin(), knots_.end(), temperature,
                                      [](double t, const Knot &k) { return t < k.first; });
  const auto lower = upper - 1;
  const double w = (temperature - lower->first) / (upper->first - lower->first);
  return lower->second + w * (upper->second - lower->second);
}

double PropertyTable::max_value() const {
  double best = knots_.front().second;
  for (const auto &k : knots_)
    best = std::max(best, k.second);
  return best;
}

double PropertyTable::integral(double t0, double t1) const {
  if (t1 < t0)
    return -integral(t1, t0);
  // Breakpoints of the interpolant inside (t0, t1), trapezoid on each piece
  // is exact for a linear function.
  double total = 0.0;
  double a = t0;
  for (const auto &k : knots_) {
    if (k.first <= a)
      continue;
    if (k.first >= t1)
      break;
    total += 0.5 * (at(a) + at(k.first)) * (k.first - a);
    a = k.first;
  }
  total += 0.5 * (at(a) + at(t1)) * (t1 - a);
  return total;
}

ThermophysicalTable::ThermophysicalTable(double density_, PropertyTable conductivity_,
                                         PropertyTable specific_heat_,
                                         std::optional<PropertyTable> yield_stress_,
                                         double emissivity_)
    : density(density_), conductivity(std::move(conductivity_)),
      specific_heat(std::move(specific_heat_)), yield_stress(std::move(yield_stress_)),
      emissivity(emissivity_) {
  require(std::isfinite(density) && density > 0.0, "ThermophysicalTable: density must be > 0");
  require(emissivity >= 0.0 && emissivity <= 1.0,
          "ThermophysicalTable: emissivity must be in [0, 1]");
}

double property_at(const ThermophysicalTable &table, Property which, double temperature) {
  switch (which) {
  case Property::Conductivity:
    return table.conductivity.at(temperature);
  case Property::SpecificHeat:
    return table.specific_heat.at(temperature);
  case Property::YieldStress:
    if (!table.yield_stress)
      throw InvalidArgument("property_at: material has no yield stress table");
    return table.yield_stress->at(temperature);
  }
  throw InvalidArgument("property_at: unknown property");
}

EnthalpyCurve::EnthalpyCurve(double density, const PropertyTable &specific_heat)
    : density_(density), cp_(specific_heat.knots()) {
  h_at_knot_.resize(cp_.size());
  h_at_knot_[0] = 0.0;
  for (std::size_t i = 1; i < cp_.size(); ++i)
    h_at_knot_[i] = h_at_knot_[i - 1] + density_ * 0.5 * (cp_[i - 1].second + cp_[i].second) *
                                            (cp_[i].first - cp_[i - 1].first);
}

double EnthalpyCurve::capacity(double temperature) const {
  if (temperature <= cp_.front().first)
    return density_ * cp_.front().second;
  if (temperature >= cp_.back().first)
    return density_ * cp_.back().second;
  const auto upper =
      std::upper_bound(cp_.begin(), cp_.end(), temperature,
                       [](double t, const PropertyTable::Knot &k) { return t < k.first; });
  const auto lower = upper - 1;
  const double w = (temperature - lower->first) / (upper->first - lower->first);
  return density_ * (lower->second + w * (upper->second - lower->second));
}

double EnthalpyCurve::enthalpy(double temperature) const {
  if (temperature <= cp_.front().first)
    return density_ * cp_.front().second * (temperature - cp_.front().first);
  if (temperature >= cp_.back().first)
    return h_at_knot_.back() + density_ * cp_.back().second * (temperature - cp_.back().first);
  const auto upper =
      std::upper_bound(cp_.begin(), cp_.end(), temperature,
                       [](double t, const PropertyTable::Knot &k) { return t < k.first; });
  const std::size_t i = static_cast<std::size_t>(upper - cp_.begin()) - 1;
  const double dt = temperature - cp_[i].first;
  const double c0 = cp_[i].second;
  const double slope = (cp_[i + 1].second - c0) / (cp_[i + 1].first - cp_[i].first);
  return h_at_knot_[i] + density_ * (c0 * dt + 0.5 * slope * dt * dt);
}

double EnthalpyCurve::temperature(double enthalpy) const {
  if (enthalpy <= 0.0)
    return cp_.front().first + enthalpy / (density_ * cp_.front().second);
  if (enthalpy >= h_at_knot_.back())
    return cp_.back().first + (enthalpy - h_at_knot_.back()) / (density_ * cp_.back().second);
  const auto upper = std::upper_bound(h_at_knot_.begin(), h_at_knot_.end(), enthalpy);
  const std::size_t i = static_cast<std::size_t>(upper - h_at_knot_.begin()) - 1;
  const double c0 = cp_[i].second;
  const double slope = (cp_[i + 1].second - c0) / (cp_[i + 1].first - cp_[i].first);
  // Solve rho (c0 x + slope x^2 / 2) = dh for x >= 0.
  const double dh = (enthalpy - h_at_knot_[i]) / density_;
  double x;
  if (std::abs(slope) * dh < 1e-12 * c0 * c0) {
    x = dh / c0;
  } else {
    // Stable root of (slope/2) x^2 + c0 x - dh = 0.
    x = 2.0 * dh / (c0 + std::sqrt(c0 * c0 + 2.0 * slope * dh));
  }
  return cp_[i].first + x;
}

} // namespace fsw
