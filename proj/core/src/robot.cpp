#include "vfence/robot.hpp"
#include "vfence/errors.hpp"

#include <cmath>

namespace vfence {

RobotState apply_command(RobotState state, const CommandOutput& cmd) {
  if (cmd.kind == CommandOutput::Kind::Halt) {
    state.leg_duration.reset();
    return state;
  }
  if (!(cmd.duration > 0.0) || !std::isfinite(cmd.duration)) {
    throw DomainError("apply_command: duration must be positive and finite");
  }
  state.leg_duration = cmd.duration;
  return state;
}

RobotState advance(RobotState state, double dt) {
  if (dt < 0.0 || !std::isfinite(dt)) {
    throw DomainError("advance: dt must be nonnegative and finite");
  }
  if (state.halted() || dt == 0.0) {
    return state;
  }
  double remaining = dt;
  const double speed = state.path_speed();
  while (remaining > 0.0) {
    const double to_boundary = (1.0 - state.s) / speed;
    if (remaining < to_boundary) {
      state.s += speed * remaining;
      break;
    }
    remaining -= to_boundary;
    state.s = 0.0;
    if (state.leg == Leg::AtoB) {
      state.leg = Leg::BtoA;
    } else {
      state.leg = Leg::AtoB;
      ++state.cycles_completed;
    }
  }
  return state;
}

bool collision_check(const RobotState& state, ZoneLabel person_zone, double critical_dwell_s,
                     double latency_budget_s) {
  return person_zone == ZoneLabel::Critical && state.path_speed() > 0.0 &&
         critical_dwell_s > latency_budget_s;
}

} // namespace vfence
