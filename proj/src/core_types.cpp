#include "fsw/core_types.hpp"

#include "fsw/error.hpp"

#include <cmath>
#include <string>

namespace fsw {

namespace {

void require(bool condition, const char *message) {
  if (!condition)
    throw InvalidArgument(message);
}

bool finite(double v) { return std::isfinite(v); }

} // namespace

ToolGeometry::ToolGeometry(double shoulder_radius, double probe_radius, double probe_height,
                           double cone_angle, double tilt_angle)
    : shoulder_radius_(shoulder_radius), probe_radius_(probe_radius),
      probe_height_(probe_height), cone_angle_(cone_angle), tilt_angle_(tilt_angle) {
  require(finite(shoulder_radius) && finite(probe_radius) && finite(probe_height) &&
              finite(cone_angle) && finite(tilt_angle),
          "ToolGeometry: non-finite value");
  require(probe_radius > 0.0, "ToolGeometry: probe radius must be > 0");
  require(probe_radius < shoulder_radius, "ToolGeometry: probe radius must be < shoulder radius");
  require(probe_height > 0.0, "ToolGeometry: probe height must be > 0");
  require(cone_angle >= 0.0 && cone_angle < pi / 2,
          "ToolGeometry: cone angle must be in [0, pi/2)");
}

double ToolGeometry::shoulder_annulus_area() const noexcept {
  return pi * (shoulder_radius_ * shoulder_radius_ - probe_radius_ * probe_radius_);
}

ProcessParameters::ProcessParameters(double omega, double traverse_speed, double downward_force,
                                     std::optional<double> torque,
                                     std::optional<double> traverse_force, double efficiency)
    : omega_(omega), traverse_speed_(traverse_speed), downward_force_(downward_force),
      torque_(torque), traverse_force_(traverse_force), efficiency_(efficiency) {
  require(finite(omega) && omega > 0.0, "ProcessParameters: omega must be > 0");
  require(finite(traverse_speed) && traverse_speed >= 0.0,
          "ProcessParameters: traverse speed must be >= 0");
  require(finite(downward_force) && downward_force >= 0.0,
          "ProcessParameters: downward force must be >= 0");
  require(!torque || (finite(*torque) && *torque >= 0.0), "ProcessParameters: torque must be >= 0");
  require(!traverse_force || finite(*traverse_force),
          "ProcessParameters: traverse force must be finite");
  require(efficiency >= 0.0 && efficiency <= 1.0,
          "ProcessParameters: efficiency must be in [0, 1]");
}

ProcessParameters ProcessParameters::with_efficiency(double efficiency) const {
  return ProcessParameters(omega_, traverse_speed_, downward_force_, torque_, traverse_force_,
                           efficiency);
}

ContactModel::ContactModel(double delta, double friction_coefficient, double contact_pressure)
    : delta_(delta), friction_coefficient_(friction_coefficient),
      contact_pressure_(contact_pressure) {
  require(delta >= 0.0 && delta <= 1.0, "ContactModel: delta must be in [0, 1]");
  require(finite(friction_coefficient) && friction_coefficient > 0.0,
          "ContactModel: friction coefficient must be > 0");
  require(finite(contact_pressure) && contact_pressure >= 0.0,
          "ContactModel: contact pressure must be >= 0");
}

double ContactModel::slip_rate(double tool_surface_speed) const {
  require(tool_surface_speed >= 0.0, "ContactModel: tool surface speed must be >= 0");
  return tool_surface_speed * (1.0 - delta_);
}

WorkpieceGeometry::WorkpieceGeometry(double length, double width, double thickness,
                                     double joint_line_offset)
    : length_(length), width_(width), thickness_(thickness),
      joint_line_offset_(joint_line_offset) {
  require(finite(length) && length > 0.0, "WorkpieceGeometry: length must be > 0");
  require(finite(width) && width > 0.0, "WorkpieceGeometry: width must be > 0");
  require(finite(thickness) && thickness > 0.0, "WorkpieceGeometry: thickness must be > 0");
  require(finite(joint_line_offset) && std::abs(joint_line_offset) < 0.5 * width,
          "WorkpieceGeometry: joint line must lie inside the plate");
}

WorkpieceGeometry::WorkpieceGeometry(double length, double width, double thickness,
                                     double joint_line_offset, const ToolGeometry &tool)
    : WorkpieceGeometry(length, width, thickness, joint_line_offset) {
  check_tool_fits(*this, tool);
}

void check_tool_fits(const WorkpieceGeometry &work, const ToolGeometry &tool) {
  require(work.thickness() >= tool.probe_height(),
          "WorkpieceGeometry: thickness must be >= probe height");
}

SparContact::SparContact(double width, double height) : width_(width), height_(height) {
  require(finite(width) && width > 0.0, "SparContact: width must be > 0");
  require(finite(height) && height > 0.0, "SparContact: height must be > 0");
}

GapConductance::GapConductance(double h_gap, bool perfect_under_tool)
    : h_gap_(h_gap), perfect_under_tool_(perfect_under_tool) {
  require(finite(h_gap) && h_gap > 0.0, "GapConductance: h_gap must be > 0");
}

std::string_view bottom_condition_name(const BottomContactCondition &condition) {
  struct Visitor {
    std::string_view operator()(const Adiabatic &) const { return "adiabatic"; }
    std::string_view operator()(const PerfectContact &) const { return "perfect"; }
    std::string_view operator()(const SparContact &) const { return "spar"; }
    std::string_view operator()(const GapConductance &) const { return "gap"; }
  };
  return std::visit(Visitor{}, condition);
}

std::string_view phase_name(PhaseKind kind) {
  switch (kind) {
  case PhaseKind::Plunge:
    return "plunge";
  case PhaseKind::Dwell:
    return "dwell";
  case PhaseKind::Traverse:
    return "traverse";
  }
  return "unknown";
}

WeldSchedule::WeldSchedule(std::vector<WeldPhase> phases) : phases_(std::move(phases)) {
  require(!phases_.empty(), "WeldSchedule: at least one phase required");
  int last_rank = -1;
  for (const auto &phase : phases_) {
    const int rank = static_cast<int>(phase.kind);
    require(rank > last_rank, "WeldSchedule: phases must be ordered plunge, dwell, traverse");
    last_rank = rank;
    require(finite(phase.duration) && phase.duration > 0.0,
            "WeldSchedule: phase durations must be > 0");
    require(finite(phase.omega) && phase.omega >= 0.0, "WeldSchedule: omega must be >= 0");
    if (phase.kind != PhaseKind::Plunge)
      require(phase.omega > 0.0, "WeldSchedule: omega must be > 0 during dwell and traverse");
    if (phase.kind == PhaseKind::Traverse)
      require(finite(phase.traverse_speed) && phase.traverse_speed > 0.0,
              "WeldSchedule: traverse phase needs traverse speed > 0");
    else
      require(phase.traverse_speed == 0.0,
              "WeldSchedule: traverse speed must be 0 outside the traverse phase");
    if (phase.kind == PhaseKind::Plunge)
      require(finite(phase.plunge_rate) && phase.plunge_rate >= 0.0,
              "WeldSchedule: plunge rate must be >= 0");
    else
      require(phase.plunge_rate == 0.0, "WeldSchedule: plunge rate only applies to plunge");
  }
}

double WeldSchedule::total_duration() const noexcept {
  double total = 0.0;
  for (const auto &phase : phases_)
    total += phase.duration;
  return total;
}

double WeldSchedule::traverse_distance() const noexcept {
  double distance = 0.0;
  for (const auto &phase : phases_)
    distance += phase.traverse_speed * phase.duration;
  return distance;
}

double shoulder_contact_pressure(double downward_force, const ToolGeometry &tool) {
  require(std::isfinite(downward_force) && downward_force >= 0.0,
          "shoulder_contact_pressure: force must be >= 0");
  const double area = tool.shoulder_annulus_area();
  require(area > 0.0, "shoulder_contact_pressure: degenerate shoulder annulus");
  return downward_force / area;
}

} // namespace fsw
