#pragma once

#include "vfence/postproc.hpp"
#include "vfence/tensor.hpp"
#include "vfence/zones.hpp"

#include <optional>
#include <utility>

namespace vfence {

/// Tunables of the per-frame control loop.
struct SupervisorConfig {
  double tau = 0.65;
  double t_buffer_s = 3.0;
  double alpha = 1.0;
  double beta = 0.85;
  double d_min = 4.0;
  double d_max = 11.0;
  double d_desired_normal = 5.0;
  double d_desired_slow = 10.0;
  double nms_iou = 0.45;

  PostprocConfig postproc() const { return PostprocConfig{tau, nms_iou}; }
  double desired_for(MotionMode mode) const;
};

/// Throws DomainError unless both duration targets lie within [d_min, d_max],
/// t_buffer_s > 0, and the QP weights are positive.
void validate(const SupervisorConfig& cfg);

struct SupervisorState {
  MotionMode mode = MotionMode::Normal;
  /// Warm-start for the next solve; frozen while stopped.
  double d_prev = 5.0;
  std::optional<double> last_detection_time;
  std::optional<double> last_step_time;
};

struct CommandOutput {
  enum class Kind { Duration, Halt };
  Kind kind = Kind::Duration;
  /// Leg duration in seconds; meaningful only when kind == Duration.
  double duration = 0.0;
  /// True when this frame switched the motion mode, so the executing robot
  /// must abandon its current timing and adopt this command mid-leg.
  bool interrupt = false;
  double timestamp = 0.0;
  MotionMode mode = MotionMode::Normal;
  /// Wall-clock compute time of the step that produced this command.
  double compute_latency_s = 0.0;
};

SupervisorState reset(const SupervisorConfig& cfg);

/// Relaxation hysteresis: a raw Normal only takes effect once t_buffer has
/// elapsed since the last detection; everything else passes through at once.
MotionMode buffered_mode(MotionMode previous, MotionMode raw,
                         std::optional<double> last_detection_time, double now,
                         double t_buffer_s);

/// One control-loop frame: decode, zone the detections, apply the relaxation
/// buffer, then either halt or solve for the next leg duration.
/// Timestamps must not regress across calls (ContractViolationError).
std::pair<SupervisorState, CommandOutput> step(const SupervisorState& state,
                                               const DetectionFrameTensor& frame, double now,
                                               const SupervisorConfig& cfg);

} // namespace vfence
