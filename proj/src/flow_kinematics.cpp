#include "fsw/flow_kinematics.hpp"

#include "fsw/error.hpp"

#include <cmath>
#include <sstream>

namespace fsw {

namespace {

void require(bool condition, const char *message) {
  if (!condition)
    throw InvalidArgument(message);
}

Vec3 axpy(const Vec3 &x, double a, const Vec3 &y) {
  return {x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
}

} // namespace

FlowField::FlowField(const ToolGeometry &tool, FlowFieldConfig config)
    : config_(config), probe_radius_(tool.probe_radius()), probe_height_(tool.probe_height()) {
  require(std::isfinite(config_.shear_zone_radius) && config_.shear_zone_radius >= probe_radius_,
          "FlowFieldConfig: shear zone radius must be >= probe radius");
  require(config_.core_radius > 0.0, "FlowFieldConfig: core radius must be > 0");
  require(config_.ring_radius > probe_radius_ && config_.ring_radius <= config_.shear_zone_radius,
          "FlowFieldConfig: ring radius must lie in (probe radius, shear zone radius]");
  require(std::isfinite(config_.omega) && std::isfinite(config_.traverse_speed) &&
              std::isfinite(config_.circulation) && std::isfinite(config_.ring_depth),
          "FlowFieldConfig: non-finite value");
}

double FlowField::angular_speed(double r) const {
  const double rs = config_.shear_zone_radius;
  if (r <= probe_radius_)
    return config_.omega;
  if (r >= rs)
    return 0.0;
  return config_.omega * (rs - r) / (rs - probe_radius_);
}

bool FlowField::inside_probe(const Vec3 &p) const {
  return std::hypot(p[0], p[1]) < probe_radius_ && p[2] > -probe_height_;
}

Vec3 FlowField::rotation_velocity(const Vec3 &p) const {
  const double w = angular_speed(std::hypot(p[0], p[1]));
  return {-w * p[1], w * p[0], 0.0};
}

Vec3 FlowField::translation_velocity() const { return {config_.traverse_speed, 0.0, 0.0}; }

namespace {

// Ein(x) = integral_0^x (1 - e^-t) / t dt, entire in x.
double ein(double x) {
  if (x < 2.0) {
    double term = x, sum = x;
    for (int k = 2; k < 40; ++k) {
      term *= -x / k;
      sum += term / k;
    }
    return sum;
  }
  constexpr double euler_gamma = 0.57721566490153286;
  return std::log(x) + euler_gamma - std::expint(-x); // E1(x) = -Ei(-x)
}

} // namespace

Vec3 FlowField::vortex_velocity(const Vec3 &p) const {
  if (config_.circulation == 0.0)
    return {0.0, 0.0, 0.0};
  // Stokes stream function psi = R phi(s) S(r): s is the distance from the
  // ring core in the meridional plane, phi the Lamb-Oseen stream function
  // (Gamma / 4 pi) Ein(s^2 / rc^2) and S = r^2 / (r^2 + rc^2) keeps the
  // field regular on the tool axis.
  const double r2 = p[0] * p[0] + p[1] * p[1];
  const double r = std::sqrt(r2);
  const double a = config_.ring_radius;
  const double dr = r - a;
  const double dz = p[2] - config_.ring_depth;
  const double rc2 = config_.core_radius * config_.core_radius;
  const double x = (dr * dr + dz * dz) / rc2;
  const double shape = x < 1e-12 ? 1.0 : -std::expm1(-x) / x;
  const double g = config_.circulation / (2.0 * pi * rc2) * shape; // phi'(s) / s
  const double phi = config_.circulation / (4.0 * pi) * ein(x);
  const double d = r2 + rc2;
  const double ur_over_r = -a * g * dz / d;
  const double uz = a * (g * dr * r / d + 2.0 * phi * rc2 / (d * d));
  return {ur_over_r * p[0], ur_over_r * p[1], uz};
}

Vec3 FlowField::velocity(const Vec3 &p) const {
  if (inside_probe(p)) {
    std::ostringstream msg;
    msg << "point (" << p[0] << ", " << p[1] << ", " << p[2] << ") lies inside the probe";
    throw InvalidArgument(msg.str());
  }
  const Vec3 rot = rotation_velocity(p);
  const Vec3 tr = translation_velocity();
  const Vec3 vx = vortex_velocity(p);
  return {rot[0] + tr[0] + vx[0], rot[1] + tr[1] + vx[1], rot[2] + tr[2] + vx[2]};
}

double numerical_divergence(const FlowField &field, const Vec3 &p, double h) {
  double div = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 plus = p, minus = p;
    plus[axis] += h;
    minus[axis] -= h;
    div += (field.velocity(plus)[axis] - field.velocity(minus)[axis]) / (2.0 * h);
  }
  return div;
}

bool Box::contains(const Vec3 &p) const {
  for (int a = 0; a < 3; ++a)
    if (p[a] < lower[a] || p[a] > upper[a])
      return false;
  return true;
}

std::string_view tracer_status_name(TracerStatus status) {
  switch (status) {
  case TracerStatus::Completed:
    return "completed";
  case TracerStatus::ExitedDomain:
    return "exited";
  case TracerStatus::EnteredProbe:
    return "probe";
  case TracerStatus::InvalidSeed:
    return "invalid_seed";
  }
  return "unknown";
}

std::vector<TracerPath> advect_tracers(const std::vector<Vec3> &seeds, const FlowField &field,
                                       double t_end, double dt, const Box &domain) {
  require(dt > 0.0 && std::isfinite(dt), "advect_tracers: dt must be > 0");
  require(t_end >= 0.0 && std::isfinite(t_end), "advect_tracers: t_end must be >= 0");

  std::vector<TracerPath> paths;
  paths.reserve(seeds.size());
  for (const Vec3 &seed : seeds) {
    TracerPath path;
    if (field.inside_probe(seed) || !domain.contains(seed)) {
      path.status = TracerStatus::InvalidSeed;
      path.error = field.inside_probe(seed) ? "seed lies inside the probe"
                                            : "seed lies outside the domain";
      paths.push_back(std::move(path));
      continue;
    }
    path.points.push_back(seed);
    Vec3 x = seed;
    double t = 0.0;
    while (t < t_end * (1.0 - 1e-12)) {
      const double h = std::min(dt, t_end - t);
      try {
        const Vec3 k1 = field.velocity(x);
        const Vec3 k2 = field.velocity(axpy(x, 0.5 * h, k1));
        const Vec3 k3 = field.velocity(axpy(x, 0.5 * h, k2));
        const Vec3 k4 = field.velocity(axpy(x, h, k3));
        Vec3 next;
        for (int a = 0; a < 3; ++a)
          next[a] = x[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        if (field.inside_probe(next)) {
          path.status = TracerStatus::EnteredProbe;
          break;
        }
        if (!domain.contains(next)) {
          path.status = TracerStatus::ExitedDomain;
          break;
        }
        x = next;
      } catch (const InvalidArgument &) {
        path.status = TracerStatus::EnteredProbe;
        break;
      }
      t += h;
      path.points.push_back(x);
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

} // namespace fsw
