#pragma once

// Kinematic material-flow surrogate around the tool: a rotating shear zone,
// a uniform translation and an axisymmetric ring vortex, each solenoidal, so
// their sum is incompressible. Tracer particles are advected through the
// composed field with classical fourth-order Runge-Kutta.
//
// Frame: origin on the tool axis at the workpiece top surface, z up (the
// workpiece occupies z <= 0), tool travel along +x. With omega > 0 the tool
// turns counter-clockwise seen from above, so the advancing side is y < 0.

#include "fsw/core_types.hpp"

#include <array>
#include <limits>
#include <string>
#include <vector>

namespace fsw {

using Vec3 = std::array<double, 3>;

struct FlowFieldConfig {
  double shear_zone_radius = 0.0; // m, rotation decays to 0 here
  double omega = 0.0;             // rad/s, rotation rate at the probe surface
  double traverse_speed = 0.0;    // m/s, uniform translation along +x
  double circulation = 0.0;       // m^2/s, ring vortex strength
  double core_radius = 0.0;       // m, vortex core radius
  double ring_radius = 0.0;       // m, vortex ring radius about the tool axis
  double ring_depth = 0.0;        // m, z of the ring centre (<= 0)

  bool operator==(const FlowFieldConfig &) const = default;
};

class FlowField {
public:
  /// Validates R_shear >= R_probe, core radius > 0 and ring radius in
  /// (R_probe, R_shear].
  FlowField(const ToolGeometry &tool, FlowFieldConfig config);

  /// Velocity at a point outside the probe; throws InvalidArgument inside.
  Vec3 velocity(const Vec3 &point) const;

  Vec3 rotation_velocity(const Vec3 &point) const;
  Vec3 translation_velocity() const;
  Vec3 vortex_velocity(const Vec3 &point) const;

  /// Angular speed of the rotating layer at radius r: omega up to the probe
  /// radius, tapering linearly to zero at the shear-zone radius.
  double angular_speed(double r) const;

  bool inside_probe(const Vec3 &point) const;

  const FlowFieldConfig &config() const noexcept { return config_; }
  double probe_radius() const noexcept { return probe_radius_; }
  double probe_height() const noexcept { return probe_height_; }

private:
  FlowFieldConfig config_;
  double probe_radius_;
  double probe_height_;
};

/// Central-difference divergence with step h.
double numerical_divergence(const FlowField &field, const Vec3 &point, double h);

struct Box {
  Vec3 lower{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};
  Vec3 upper{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
  bool contains(const Vec3 &p) const;
};

enum class TracerStatus { Completed, ExitedDomain, EnteredProbe, InvalidSeed };

std::string_view tracer_status_name(TracerStatus status);

struct TracerPath {
  std::vector<Vec3> points; // seed first
  TracerStatus status = TracerStatus::Completed;
  std::string error; // set for InvalidSeed
};

/// RK4 integration of dX/dt = v(X) from t = 0 to t_end with step dt (the
/// final step is shortened to land on t_end). A tracer leaving `domain` is
/// truncated at its last inside point. A bad seed yields an InvalidSeed path
/// and the other tracers proceed.
std::vector<TracerPath> advect_tracers(const std::vector<Vec3> &seeds, const FlowField &field,
                                       double t_end, double dt, const Box &domain = {});

} // namespace fsw
