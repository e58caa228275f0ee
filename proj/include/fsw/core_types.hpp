#pragma once

// Geometry, process-parameter and schedule types shared by every module.
// All quantities are SI (m, rad, rad/s, m/s, N, N*m, Pa, K, s). Every type
// validates its invariants in the constructor and throws fsw::InvalidArgument
// on violation; instances are immutable afterwards.

#include <numbers>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace fsw {

inline constexpr double pi = std::numbers::pi;

/// Simplified tool: conical (or flat) shoulder, cylindrical probe with a
/// flat tip. `cone_angle` = 0 is a flat shoulder. `tilt_angle` is kept for
/// bookkeeping only and has no thermal effect.
class ToolGeometry {
public:
  ToolGeometry(double shoulder_radius, double probe_radius, double probe_height,
               double cone_angle = 0.0, double tilt_angle = 0.0);

  double shoulder_radius() const noexcept { return shoulder_radius_; }
  double probe_radius() const noexcept { return probe_radius_; }
  double probe_height() const noexcept { return probe_height_; }
  double cone_angle() const noexcept { return cone_angle_; }
  double tilt_angle() const noexcept { return tilt_angle_; }

  /// Projected area of the shoulder annulus (probe footprint excluded).
  double shoulder_annulus_area() const noexcept;

  bool operator==(const ToolGeometry &) const = default;

private:
  double shoulder_radius_;
  double probe_radius_;
  double probe_height_;
  double cone_angle_;
  double tilt_angle_;
};

class ProcessParameters {
public:
  static constexpr double default_efficiency = 0.95;

  ProcessParameters(double omega, double traverse_speed, double downward_force,
                    std::optional<double> torque = std::nullopt,
                    std::optional<double> traverse_force = std::nullopt,
                    double efficiency = default_efficiency);

  double omega() const noexcept { return omega_; }
  double traverse_speed() const noexcept { return traverse_speed_; }
  double downward_force() const noexcept { return downward_force_; }
  const std::optional<double> &torque() const noexcept { return torque_; }
  const std::optional<double> &traverse_force() const noexcept { return traverse_force_; }
  double efficiency() const noexcept { return efficiency_; }

  ProcessParameters with_efficiency(double efficiency) const;

  bool operator==(const ProcessParameters &) const = default;

private:
  double omega_;
  double traverse_speed_;
  double downward_force_;
  std::optional<double> torque_;
  std::optional<double> traverse_force_;
  double efficiency_;
};

/// Tool/workpiece interface state. delta = 0 is sliding, 1 sticking.
class ContactModel {
public:
  ContactModel(double delta, double friction_coefficient, double contact_pressure);

  double delta() const noexcept { return delta_; }
  double friction_coefficient() const noexcept { return friction_coefficient_; }
  double contact_pressure() const noexcept { return contact_pressure_; }

  /// Velocity difference between tool and matrix surface for a given tool
  /// surface speed.
  double slip_rate(double tool_surface_speed) const;

  bool operator==(const ContactModel &) const = default;

private:
  double delta_;
  double friction_coefficient_;
  double contact_pressure_;
};

/// Rectangular plate. x runs along the weld, y across it, z up through the
/// thickness. The joint line sits at y = width/2 + joint_line_offset.
class WorkpieceGeometry {
public:
  WorkpieceGeometry(double length, double width, double thickness,
                    double joint_line_offset = 0.0);
  WorkpieceGeometry(double length, double width, double thickness, double joint_line_offset,
                    const ToolGeometry &tool);

  double length() const noexcept { return length_; }
  double width() const noexcept { return width_; }
  double thickness() const noexcept { return thickness_; }
  double joint_line_offset() const noexcept { return joint_line_offset_; }
  double joint_line_y() const noexcept { return 0.5 * width_ + joint_line_offset_; }

  bool operator==(const WorkpieceGeometry &) const = default;

private:
  double length_;
  double width_;
  double thickness_;
  double joint_line_offset_;
};

/// Throws InvalidArgument if the probe is taller than the plate is thick.
void check_tool_fits(const WorkpieceGeometry &work, const ToolGeometry &tool);

// Workpiece/backing interface options.

struct Adiabatic {
  bool operator==(const Adiabatic &) const = default;
};

struct PerfectContact {
  bool operator==(const PerfectContact &) const = default;
};

/// Backing strip of given width (across the weld) and height running under
/// the joint line; perfect contact on the strip, insulated elsewhere.
class SparContact {
public:
  SparContact(double width, double height);
  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }
  bool operator==(const SparContact &) const = default;

private:
  double width_;
  double height_;
};

/// Finite contact conductance between workpiece and backing plate. With
/// `perfect_under_tool`, columns under the shoulder are in perfect contact.
class GapConductance {
public:
  static constexpr double default_h_gap = 1000.0;

  explicit GapConductance(double h_gap = default_h_gap, bool perfect_under_tool = true);
  double h_gap() const noexcept { return h_gap_; }
  bool perfect_under_tool() const noexcept { return perfect_under_tool_; }
  bool operator==(const GapConductance &) const = default;

private:
  double h_gap_;
  bool perfect_under_tool_;
};

using BottomContactCondition = std::variant<Adiabatic, PerfectContact, SparContact, GapConductance>;

std::string_view bottom_condition_name(const BottomContactCondition &condition);

enum class PhaseKind { Plunge, Dwell, Traverse };

std::string_view phase_name(PhaseKind kind);

struct WeldPhase {
  PhaseKind kind;
  double duration;           // s
  double omega;              // rad/s
  double traverse_speed = 0; // m/s, Traverse only
  double plunge_rate = 0;    // m/s, Plunge only
  bool operator==(const WeldPhase &) const = default;
};

/// Ordered plunge -> dwell -> traverse timeline; any subset may be present
/// but at most one of each and in that order.
class WeldSchedule {
public:
  explicit WeldSchedule(std::vector<WeldPhase> phases);

  const std::vector<WeldPhase> &phases() const noexcept { return phases_; }
  double total_duration() const noexcept;
  /// Distance travelled by the tool over the whole schedule.
  double traverse_distance() const noexcept;

  bool operator==(const WeldSchedule &) const = default;

private:
  std::vector<WeldPhase> phases_;
};

/// Mean normal pressure of the downward force over the shoulder annulus.
double shoulder_contact_pressure(double downward_force, const ToolGeometry &tool);

} // namespace fsw
