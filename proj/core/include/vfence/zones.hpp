#pragma once

#include "vfence/postproc.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace vfence {

enum class ZoneLabel {
  Clear = 0,     ///< Outside the frame entirely.
  Attention = 1, ///< Visible but only in a side band.
  Critical = 2,  ///< Overlaps the central band in front of the robot.
};

enum class MotionMode {
  Normal = 0,
  Slow = 1,
  Stop = 2,
};

const char* zone_name(ZoneLabel zone);
const char* mode_name(MotionMode mode);

/// Horizontal partition of the camera frame. The central band spans the
/// middle half of the image; the flanking quarters demand slowing down.
struct ZoneLayout {
  double frame_width = 0.0;
  double critical_lo = 0.0;
  double critical_hi = 0.0;

  explicit ZoneLayout(double width);
};

/// Zone of one detection by horizontal interval overlap. The central band is
/// closed, so a box touching it at a single point already counts as Critical.
ZoneLabel classify_detection(const PersonDetection& det, const ZoneLayout& layout);

MotionMode mode_for_zone(ZoneLabel zone);

/// Per-frame motion command and which detection forced it.
struct RawZoneCommand {
  MotionMode kind = MotionMode::Normal;
  ZoneLabel source_zone = ZoneLabel::Clear;
  std::optional<std::size_t> source_index;
};

/// Most restrictive command across all detections; Normal when none.
RawZoneCommand frame_command(std::span<const PersonDetection> detections,
                             const ZoneLayout& layout);

/// Signed clearance of a point from the central band, as a distance from the
/// frame center: q_e is that distance and b = q_e - W/4 is negative exactly
/// when the point lies inside the band.
struct SafetyMembership {
  double q_e = 0.0;
  double b = 0.0;
  bool safe() const { return b >= 0.0; }
};

SafetyMembership evaluate_safety_membership(double center_x, const ZoneLayout& layout);

/// A safety rule is a conjunction of constraint functions g(q, q_e) >= 0,
/// where q is the robot configuration and q_e the person's distance from the
/// frame center; the admissible set is the intersection over all of them.
struct SafetyRule {
  int id = 0;
  std::vector<std::function<double(double, double)>> constraints;
};

/// The camera-band rule: admissible exactly when the person stays at least a
/// quarter frame away from the center, i.e. clear of the central band.
SafetyRule camera_zone_rule(const ZoneLayout& layout);

bool rule_satisfied(const SafetyRule& rule, double q, double q_e);

/// AND over several rules: q is safe only if every rule admits it.
bool safety_set_contains(std::span<const SafetyRule> rules, double q, double q_e);

} // namespace vfence
