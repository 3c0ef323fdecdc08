#include "vfence/supervisor.hpp"
#include "vfence/errors.hpp"
#include "vfence/qp.hpp"

#include <chrono>
#include <cmath>

namespace vfence {

double SupervisorConfig::desired_for(MotionMode mode) const {
  switch (mode) {
  case MotionMode::Normal:
    return d_desired_normal;
  case MotionMode::Slow:
    return d_desired_slow;
  case MotionMode::Stop:
    break;
  }
  throw DomainError("SupervisorConfig: Stop has no duration target");
}

void validate(const SupervisorConfig& cfg) {
  QpParams probe;
  probe.alpha = cfg.alpha;
  probe.beta = cfg.beta;
  probe.d_min = cfg.d_min;
  probe.d_max = cfg.d_max;
  validate(probe);
  if (!(cfg.tau >= 0.0 && cfg.tau < 1.0)) {
    throw DomainError("SupervisorConfig: tau must lie in [0, 1)");
  }
  if (!(cfg.t_buffer_s > 0.0) || !std::isfinite(cfg.t_buffer_s)) {
    throw DomainError("SupervisorConfig: t_buffer_s must be positive");
  }
  for (double target : {cfg.d_desired_normal, cfg.d_desired_slow}) {
    if (!(target >= cfg.d_min && target <= cfg.d_max)) {
      throw DomainError("SupervisorConfig: duration targets must lie within [d_min, d_max]");
    }
  }
  if (!(cfg.nms_iou >= 0.0 && cfg.nms_iou <= 1.0)) {
    throw DomainError("SupervisorConfig: nms_iou must lie in [0, 1]");
  }
}

SupervisorState reset(const SupervisorConfig& cfg) {
  validate(cfg);
  SupervisorState s;
  s.mode = MotionMode::Normal;
  s.d_prev = cfg.d_desired_normal;
  return s;
}

MotionMode buffered_mode(MotionMode previous, MotionMode raw,
                         std::optional<double> last_detection_time, double now,
                         double t_buffer_s) {
  if (raw == MotionMode::Normal && previous != MotionMode::Normal && last_detection_time &&
      now - *last_detection_time < t_buffer_s) {
    return previous;
  }
  return raw;
}

std::pair<SupervisorState, CommandOutput> step(const SupervisorState& state,
                                               const DetectionFrameTensor& frame, double now,
                                               const SupervisorConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (state.last_step_time && now < *state.last_step_time) {
    throw ContractViolationError("supervisor step: timestamp regressed from " +
                                 std::to_string(*state.last_step_time) + " to " +
                                 std::to_string(now));
  }

  const auto detections = decode(frame, cfg.postproc());
  const ZoneLayout layout(static_cast<double>(frame.frame_width));
  const RawZoneCommand raw = frame_command(detections, layout);

  SupervisorState next = state;
  next.last_step_time = now;
  if (!detections.empty()) {
    next.last_detection_time = now;
  }

  const MotionMode mode =
      buffered_mode(state.mode, raw.kind, next.last_detection_time, now, cfg.t_buffer_s);

  CommandOutput out;
  out.timestamp = now;
  out.mode = mode;
  out.interrupt = mode != state.mode;
  next.mode = mode;

  if (mode == MotionMode::Stop) {
    out.kind = CommandOutput::Kind::Halt;
    // d_prev keeps its pre-stop value so resumption re-enters the solve
    // from the last commanded duration.
  } else {
    QpParams p;
    p.alpha = cfg.alpha;
    p.beta = cfg.beta;
    p.d_desired = cfg.desired_for(mode);
    p.d_prev = state.d_prev;
    p.d_min = cfg.d_min;
    p.d_max = cfg.d_max;
    const DurationSolution sol = solve_sqp(p);
    out.kind = CommandOutput::Kind::Duration;
    out.duration = sol.d_star;
    next.d_prev = sol.d_star;
  }

  out.compute_latency_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {next, out};
}

} // namespace vfence
