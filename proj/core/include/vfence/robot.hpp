#pragma once

#include "vfence/supervisor.hpp"
#include "vfence/zones.hpp"

#include <cstdint>
#include <optional>

namespace vfence {

enum class Leg { AtoB, BtoA };

/// Kinematic state of the cyclic pick-and-place task. The robot shuttles
/// between two fixed points; one cycle is a full round trip. Position is the
/// normalized fraction s of the current leg already covered.
struct RobotState {
  double s = 0.0;
  Leg leg = Leg::AtoB;
  std::uint64_t cycles_completed = 0;
  /// Commanded one-way leg duration; empty while halted.
  std::optional<double> leg_duration;

  bool halted() const { return !leg_duration.has_value(); }
  /// Path speed in leg fractions per second: 1/duration, 0 when halted.
  double path_speed() const { return leg_duration ? 1.0 / *leg_duration : 0.0; }
};

/// One point of the recorded velocity profile.
struct VelocitySample {
  double t = 0.0;
  double speed = 0.0; ///< Path speed, leg fractions per second.
  MotionMode mode = MotionMode::Normal;
};

/// Re-times the current leg: a Duration command makes the robot cover the
/// remaining fraction (1 - s) at the uniform speed 1/d, taking effect
/// immediately and mid-leg; Halt freezes the pose. Position never jumps.
RobotState apply_command(RobotState state, const CommandOutput& cmd);

/// Integrates motion over dt seconds. Reaching the end of a leg flips to the
/// other leg and spends the residual time there at the same speed; finishing
/// a BtoA leg completes a cycle.
RobotState advance(RobotState state, double dt);

/// A would-be contact: the person occupies the central band, the robot is
/// still moving, and the dwell already exceeds the latency budget granted to
/// the sensing pipeline.
bool collision_check(const RobotState& state, ZoneLabel person_zone, double critical_dwell_s,
                     double latency_budget_s);

} // namespace vfence
