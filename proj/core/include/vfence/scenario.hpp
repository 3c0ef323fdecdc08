#pragma once

#include "vfence/config.hpp"
#include "vfence/robot.hpp"
#include "vfence/supervisor.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vfence {

/// One window of scripted human presence: during [t_start, t_end) the person
/// stands at center_x pixels. An absent center_x makes the window explicitly
/// empty, same as scripting no event at all.
struct ScenarioEvent {
  double t_start = 0.0;
  double t_end = 0.0;
  std::optional<double> center_x;
};

/// A replayable experiment: the robot cycles until total_cycles complete
/// while a scripted person enters and leaves the camera view.
/// Event times are offsets from the moment the robot finishes its
/// anchor_cycle-th cycle (0 anchors them to the start of the run), so
/// "after the first cycle, ..." scripts survive any change in robot timing.
struct ScenarioScript {
  std::uint64_t total_cycles = 6;
  double frame_width = 1280.0;
  std::uint64_t anchor_cycle = 0;
  std::vector<ScenarioEvent> events;
};

/// Throws DomainError unless events are time-sorted, non-overlapping, have
/// t_start < t_end, and positions lie within [0, frame_width].
void validate(const ScenarioScript& script);

ScenarioScript parse_scenario(const std::string& json_text);
std::string serialize_scenario(const ScenarioScript& script);
ScenarioScript load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioScript& script, const std::filesystem::path& path);

/// The three safeguarding methods under comparison.
enum class MethodKind {
  ImmediateStop = 0, ///< Any detection anywhere in frame halts the robot.
  ZoneBased = 1,     ///< Zone commands with durations jumping straight to target.
  ZoneBasedSqp = 2,  ///< Zone commands with smoothed durations (full control loop).
};

const char* method_name(MethodKind method);
MethodKind method_from_name(std::string_view name);

struct LatencyStats {
  double mean_ms = 0.0;
  double p99_ms = 0.0;
};

struct MetricsReport {
  MethodKind method = MethodKind::ZoneBasedSqp;
  double operational_efficiency_pct = 0.0;
  double collision_avoidance_rate_pct = 100.0;
  /// Exact measured compute latencies; serialized only as a quantized
  /// ceiling so reports stay reproducible byte for byte.
  LatencyStats latency;
  double total_time_s = 0.0;
  double ideal_time_s = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t intrusion_events = 0;
  std::uint64_t collision_events = 0;
  std::uint64_t seed = 0;
  std::vector<CommandOutput> command_timeline;
  std::vector<VelocitySample> velocity_profile;
};

/// Replays the script against one method. Deterministic given
/// (script, method, cfg, seed); the seed is recorded for provenance and
/// reserved for future randomized variants. Throws TimeoutError when the
/// robot cannot finish within cfg.wall_timeout_s of wall time.
MetricsReport run(const ScenarioScript& script, MethodKind method, const RunConfig& cfg,
                  std::uint64_t seed = 0);

/// Reports in fixed row order: ImmediateStop, ZoneBased, ZoneBasedSqp.
struct ComparisonResult {
  std::array<MetricsReport, 3> reports;
};

/// Runs all three methods on the identical script, in parallel.
ComparisonResult compare(const ScenarioScript& script, const RunConfig& cfg,
                         std::uint64_t seed = 0);

/// Largest jump between consecutive velocity samples, normalized by the
/// normal-mode speed. Pairs touching a Stop sample are skipped: halts are
/// identical across methods by design, and the statistic measures how
/// gently a method changes speed while the robot is moving.
double max_step_ratio(std::span<const VelocitySample> profile, double normal_speed);

/// Reported latencies are rounded up to this quantum (milliseconds), so a
/// report says "at most this much" instead of leaking run-to-run jitter.
inline constexpr double kLatencyReportQuantumMs = 0.5;
double quantize_latency_ms(double value_ms);

std::string metrics_to_json(const MetricsReport& report);
std::string comparison_table_text(const ComparisonResult& result, double normal_speed);
std::string comparison_table_csv(const ComparisonResult& result, double normal_speed);
std::string velocity_profile_csv(std::span<const VelocitySample> profile);
/// Exact (unquantized) latency figures, intended for stderr.
std::string latency_detail_text(const MetricsReport& report);

} // namespace vfence
