#include "vfence/zones.hpp"
#include "vfence/errors.hpp"

#include <cmath>

namespace vfence {

const char* zone_name(ZoneLabel zone) {
  switch (zone) {
  case ZoneLabel::Clear:
    return "clear";
  case ZoneLabel::Attention:
    return "attention";
  case ZoneLabel::Critical:
    return "critical";
  }
  return "unknown";
}

const char* mode_name(MotionMode mode) {
  switch (mode) {
  case MotionMode::Normal:
    return "normal";
  case MotionMode::Slow:
    return "slow";
  case MotionMode::Stop:
    return "stop";
  }
  return "unknown";
}

ZoneLayout::ZoneLayout(double width) : frame_width(width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw DomainError("ZoneLayout: frame width must be positive and finite");
  }
  critical_lo = width / 4.0;
  critical_hi = 3.0 * width / 4.0;
}

ZoneLabel classify_detection(const PersonDetection& det, const ZoneLayout& layout) {
  if (det.x2 >= layout.critical_lo && det.x1 <= layout.critical_hi) {
    return ZoneLabel::Critical;
  }
  if (det.x2 >= 0.0 && det.x1 <= layout.frame_width) {
    return ZoneLabel::Attention;
  }
  return ZoneLabel::Clear;
}

MotionMode mode_for_zone(ZoneLabel zone) {
  switch (zone) {
  case ZoneLabel::Critical:
    return MotionMode::Stop;
  case ZoneLabel::Attention:
    return MotionMode::Slow;
  case ZoneLabel::Clear:
    return MotionMode::Normal;
  }
  throw DomainError("mode_for_zone: unknown zone label");
}

RawZoneCommand frame_command(std::span<const PersonDetection> detections,
                             const ZoneLayout& layout) {
  RawZoneCommand cmd;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const ZoneLabel zone = classify_detection(detections[i], layout);
    const MotionMode mode = mode_for_zone(zone);
    if (static_cast<int>(mode) > static_cast<int>(cmd.kind) || !cmd.source_index) {
      cmd.kind = mode;
      cmd.source_zone = zone;
      cmd.source_index = i;
    }
    if (cmd.kind == MotionMode::Stop) {
      break;
    }
  }
  return cmd;
}

SafetyMembership evaluate_safety_membership(double center_x, const ZoneLayout& layout) {
  SafetyMembership m;
  m.q_e = std::abs(center_x - layout.frame_width / 2.0);
  m.b = m.q_e - layout.frame_width / 4.0;
  return m;
}

SafetyRule camera_zone_rule(const ZoneLayout& layout) {
  SafetyRule rule;
  rule.id = 1;
  rule.constraints.push_back([quarter = layout.frame_width / 4.0](double /*q*/, double q_e) {
    return q_e - quarter;
  });
  return rule;
}

bool rule_satisfied(const SafetyRule& rule, double q, double q_e) {
  for (const auto& g : rule.constraints) {
    if (g(q, q_e) < 0.0) {
      return false;
    }
  }
  return true;
}

bool safety_set_contains(std::span<const SafetyRule> rules, double q, double q_e) {
  for (const auto& rule : rules) {
    if (!rule_satisfied(rule, q, q_e)) {
      return false;
    }
  }
  return true;
}

} // namespace vfence
