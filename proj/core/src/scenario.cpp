#include "vfence/scenario.hpp"
#include "vfence/errors.hpp"
#include "vfence/postproc.hpp"
#include "vfence/tensor.hpp"
#include "vfence/zones.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

namespace vfence {

namespace {

using ordered_json = nlohmann::ordered_json;

// Class score assigned to empty tensor columns; sigmoid(-4) ~ 0.018, far
// below any sane detection threshold.
constexpr double kBackgroundLogit = -4.0;

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

} // namespace

void validate(const ScenarioScript& script) {
  if (script.total_cycles == 0) {
    throw DomainError("scenario: total_cycles must be at least 1");
  }
  if (!(script.frame_width > 0.0) || !std::isfinite(script.frame_width)) {
    throw DomainError("scenario: frame_width must be positive and finite");
  }
  if (script.anchor_cycle > script.total_cycles) {
    throw DomainError("scenario: anchor_cycle cannot exceed total_cycles");
  }
  double prev_end = 0.0;
  for (std::size_t i = 0; i < script.events.size(); ++i) {
    const ScenarioEvent& e = script.events[i];
    if (!std::isfinite(e.t_start) || !std::isfinite(e.t_end) || e.t_start < 0.0 ||
        !(e.t_start < e.t_end)) {
      throw DomainError("scenario: event " + std::to_string(i) +
                        " must satisfy 0 <= t_start < t_end");
    }
    if (i > 0 && e.t_start < prev_end) {
      throw DomainError("scenario: event " + std::to_string(i) +
                        " overlaps or precedes the previous event");
    }
    if (e.center_x && !(*e.center_x >= 0.0 && *e.center_x <= script.frame_width)) {
      throw DomainError("scenario: event " + std::to_string(i) +
                        " center_x must lie within [0, frame_width]");
    }
    prev_end = e.t_end;
  }
}

ScenarioScript parse_scenario(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ParseError("scenario: top level must be an object");
  }

  ScenarioScript script;
  script.events.clear();
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "total_cycles") {
        script.total_cycles = value.get<std::uint64_t>();
      } else if (key == "frame_width") {
        script.frame_width = value.get<double>();
      } else if (key == "anchor_cycle") {
        script.anchor_cycle = value.get<std::uint64_t>();
      } else if (key == "events") {
        for (const auto& ev : value) {
          ScenarioEvent e;
          for (const auto& [ekey, evalue] : ev.items()) {
            if (ekey == "t_start") {
              e.t_start = evalue.get<double>();
            } else if (ekey == "t_end") {
              e.t_end = evalue.get<double>();
            } else if (ekey == "center_x") {
              if (!evalue.is_null()) {
                e.center_x = evalue.get<double>();
              }
            } else {
              throw ParseError("scenario: unknown event key '" + ekey + "'");
            }
          }
          script.events.push_back(e);
        }
      } else {
        throw ParseError("scenario: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: wrong field type: ") + e.what());
  }
  validate(script);
  return script;
}

std::string serialize_scenario(const ScenarioScript& script) {
  validate(script);
  ordered_json j;
  j["total_cycles"] = script.total_cycles;
  j["frame_width"] = script.frame_width;
  j["anchor_cycle"] = script.anchor_cycle;
  j["events"] = ordered_json::array();
  for (const ScenarioEvent& e : script.events) {
    ordered_json ev;
    ev["t_start"] = e.t_start;
    ev["t_end"] = e.t_end;
    if (e.center_x) {
      ev["center_x"] = *e.center_x;
    }
    j["events"].push_back(ev);
  }
  return j.dump(2) + "\n";
}

ScenarioScript load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("scenario: cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario(const ScenarioScript& script, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("scenario: cannot open '" + path.string() + "' for writing");
  }
  out << serialize_scenario(script);
  if (!out) {
    throw IoError("scenario: write to '" + path.string() + "' failed");
  }
}

const char* method_name(MethodKind method) {
  switch (method) {
  case MethodKind::ImmediateStop:
    return "immediate_stop";
  case MethodKind::ZoneBased:
    return "zone_based";
  case MethodKind::ZoneBasedSqp:
    return "zone_based_sqp";
  }
  return "unknown";
}

MethodKind method_from_name(std::string_view name) {
  if (name == "immediate_stop") {
    return MethodKind::ImmediateStop;
  }
  if (name == "zone_based") {
    return MethodKind::ZoneBased;
  }
  if (name == "zone_based_sqp") {
    return MethodKind::ZoneBasedSqp;
  }
  throw DomainError("unknown method '" + std::string(name) +
                    "'; expected immediate_stop, zone_based, or zone_based_sqp");
}

namespace {

///// The person the camera would see: the scripted box clipped to the frame.
/// Returns corner x-extent, or nothing when no person is present.
std::optional<std::pair<double, double>> visible_extent(std::optional<double> center_x,
                                                        double person_width, double frame_width,
                                                        double frame_height) {
  if (!center_x) {
    return std::nullopt;
  }
  const double cap = 2.0 * std::max(frame_width, frame_height);
  const double x1 = std::max(0.0, *center_x - person_width / 2.0);
  const double x2 = std::min(cap, *center_x + person_width / 2.0);
  if (!(x2 > x1)) {
    return std::nullopt;
  }
  return std::make_pair(x1, x2);
}

struct EpisodeTracker {
  bool inside = false;
  bool collided = false;
  double entered_at = 0.0;
  std::uint64_t intrusions = 0;
  std::uint64_t collisions = 0;

  void observe(double t, ZoneLabel gt_zone, const RobotState& robot, double budget_s) {
    if (gt_zone != ZoneLabel::Critical) {
      inside = false;
      return;
    }
    if (!inside) {
      inside = true;
      collided = false;
      entered_at = t;
      ++intrusions;
    }
    if (!collided && collision_check(robot, gt_zone, t - entered_at, budget_s)) {
      collided = true;
      ++collisions;
    }
  }
};

LatencyStats aggregate_latency(std::vector<double> samples_ms) {
  LatencyStats stats;
  if (samples_ms.empty()) {
    return stats;
  }
  stats.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) /
                  static_cast<double>(samples_ms.size());
  std::sort(samples_ms.begin(), samples_ms.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(0.99 * static_cast<double>(samples_ms.size())));
  stats.p99_ms = samples_ms[rank == 0 ? 0 : rank - 1];
  return stats;
}

} // namespace

MetricsReport run(const ScenarioScript& script, MethodKind method, const RunConfig& cfg,
                  std::uint64_t seed) {
  validate(script);
  validate(cfg);

  const double dt = cfg.sim_step_ms / 1000.0;
  const double frame_period = cfg.frame_period_ms / 1000.0;
  const double budget_s = cfg.latency_budget_ms / 1000.0;
  const double fire_eps = dt * 1e-6;
  const auto tensor_width = static_cast<std::uint32_t>(script.frame_width);
  const auto tensor_height = static_cast<std::uint32_t>(cfg.frame_height);
  if (static_cast<double>(tensor_width) != script.frame_width || tensor_width == 0) {
    throw DomainError("run: script frame_width must be a positive integer pixel count");
  }

  const ZoneLayout layout(script.frame_width);
  const SupervisorConfig& sup_cfg = cfg.supervisor;

  RobotState robot;
  SupervisorState sup = reset(sup_cfg);
  MotionMode prev_mode = MotionMode::Normal;
  std::optional<double> last_detection_time;
  EpisodeTracker episodes;

  MetricsReport report;
  report.method = method;
  report.seed = seed;
  report.ideal_time_s =
      static_cast<double>(script.total_cycles) * 2.0 * sup_cfg.d_desired_normal;

  std::vector<double> latencies_ms;
  std::optional<double> anchor_time;
  if (script.anchor_cycle == 0) {
    anchor_time = 0.0;
  }

  const auto wall_start = std::chrono::steady_clock::now();
  std::uint64_t step_count = 0;
  std::uint64_t frame_idx = 0;

  while (robot.cycles_completed < script.total_cycles) {
    const double t = static_cast<double>(step_count) * dt;

    if ((step_count & 1023u) == 0u) {
      const double wall_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
      if (wall_s > cfg.wall_timeout_s) {
        throw TimeoutError("run: scenario '" + std::string(method_name(method)) +
                           "' exceeded the wall-time cap of " +
                           std::to_string(cfg.wall_timeout_s) + " s at simulated t=" +
                           std::to_string(t) + " s; the robot cannot finish its cycles");
      }
    }

    if (!anchor_time && robot.cycles_completed >= script.anchor_cycle) {
      anchor_time = t;
    }

    std::optional<double> center_x;
    if (anchor_time) {
      const double rel = t - *anchor_time;
      for (const ScenarioEvent& e : script.events) {
        if (rel >= e.t_start && rel < e.t_end) {
          center_x = e.center_x;
          break;
        }
      }
    }
    const auto extent =
        visible_extent(center_x, cfg.person_width, script.frame_width, cfg.frame_height);

    if (t >= static_cast<double>(frame_idx) * frame_period - fire_eps) {
      DetectionFrameTensor frame;
      if (extent) {
        const double coord_cap = 2.0 * std::max(script.frame_width, cfg.frame_height);
        const double y1 = std::max(0.0, (cfg.frame_height - cfg.person_height) / 2.0);
        const double y2 = std::min(coord_cap, (cfg.frame_height + cfg.person_height) / 2.0);
        const GroundTruthPerson person{(extent->first + extent->second) / 2.0, (y1 + y2) / 2.0,
                                       extent->second - extent->first, y2 - y1,
                                       cfg.person_confidence};
        frame = synthesize_tensor({&person, 1}, cfg.n_candidates, tensor_width, tensor_height,
                                  kBackgroundLogit, cfg.duplicates);
      } else {
        frame = synthesize_tensor({}, cfg.n_candidates, tensor_width, tensor_height,
                                  kBackgroundLogit, 0);
      }

      const auto t0 = std::chrono::steady_clock::now();
      CommandOutput cmd;
      if (method == MethodKind::ZoneBasedSqp) {
        auto [next_sup, out] = step(sup, frame, t, sup_cfg);
        sup = next_sup;
        cmd = out;
      } else {
        const auto detections = decode(frame, sup_cfg.postproc());
        if (!detections.empty()) {
          last_detection_time = t;
        }
        const MotionMode raw = method == MethodKind::ImmediateStop
                                   ? (detections.empty() ? MotionMode::Normal : MotionMode::Stop)
                                   : frame_command(detections, layout).kind;
        const MotionMode mode =
            buffered_mode(prev_mode, raw, last_detection_time, t, sup_cfg.t_buffer_s);
        cmd.timestamp = t;
        cmd.mode = mode;
        cmd.interrupt = mode != prev_mode;
        if (mode == MotionMode::Stop) {
          cmd.kind = CommandOutput::Kind::Halt;
        } else {
          cmd.kind = CommandOutput::Kind::Duration;
          cmd.duration = sup_cfg.desired_for(mode);
        }
        prev_mode = mode;
      }
      cmd.compute_latency_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      latencies_ms.push_back(cmd.compute_latency_s * 1000.0);

      robot = apply_command(robot, cmd);
      report.command_timeline.push_back(cmd);
      report.velocity_profile.push_back(VelocitySample{t, robot.path_speed(), cmd.mode});
      ++frame_idx;
    }

    ZoneLabel gt_zone = ZoneLabel::Clear;
    if (extent) {
      PersonDetection gt;
      gt.x1 = extent->first;
      gt.x2 = extent->second;
      gt.y1 = 0.0;
      gt.y2 = cfg.person_height;
      gt_zone = classify_detection(gt, layout);
    }
    episodes.observe(t, gt_zone, robot, budget_s);

    robot = advance(robot, dt);
    ++step_count;
  }

  report.total_time_s = static_cast<double>(step_count) * dt;
  report.frames = frame_idx;
  report.intrusion_events = episodes.intrusions;
  report.collision_events = episodes.collisions;
  report.operational_efficiency_pct = 100.0 * report.ideal_time_s / report.total_time_s;
  report.collision_avoidance_rate_pct =
      episodes.intrusions == 0
          ? 100.0
          : 100.0 * (1.0 - static_cast<double>(episodes.collisions) /
                               static_cast<double>(episodes.intrusions));
  report.latency = aggregate_latency(std::move(latencies_ms));
  return report;
}

ComparisonResult compare(const ScenarioScript& script, const RunConfig& cfg,
                         std::uint64_t seed) {
  auto launch = [&](MethodKind method) {
    return std::async(std::launch::async, [&, method] { return run(script, method, cfg, seed); });
  };
  auto f0 = launch(MethodKind::ImmediateStop);
  auto f1 = launch(MethodKind::ZoneBased);
  auto f2 = launch(MethodKind::ZoneBasedSqp);
  return ComparisonResult{{f0.get(), f1.get(), f2.get()}};
}

double max_step_ratio(std::span<const VelocitySample> profile, double normal_speed) {
  if (profile.empty()) {
    throw DomainError("max_step_ratio: profile must be non-empty");
  }
  if (!(normal_speed > 0.0) || !std::isfinite(normal_speed)) {
    throw DomainError("max_step_ratio: normal_speed must be positive");
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < profile.size(); ++i) {
    if (profile[i - 1].mode == MotionMode::Stop || profile[i].mode == MotionMode::Stop) {
      continue;
    }
    worst = std::max(worst, std::abs(profile[i].speed - profile[i - 1].speed));
  }
  return worst / normal_speed;
}

double quantize_latency_ms(double value_ms) {
  if (!(value_ms > 0.0)) {
    return kLatencyReportQuantumMs;
  }
  return std::ceil(value_ms / kLatencyReportQuantumMs) * kLatencyReportQuantumMs;
}

std::string metrics_to_json(const MetricsReport& report) {
  ordered_json j;
  j["method"] = method_name(report.method);
  j["operational_efficiency_pct"] = report.operational_efficiency_pct;
  j["collision_avoidance_rate_pct"] = report.collision_avoidance_rate_pct;
  // Ceilings, not measurements: exact wall-clock figures vary run to run and
  // would break reproducible reports. This covers compute only (decode, zone
  // logic, solve); camera capture and neural-network inference are not
  // simulated, so the figure is not comparable to an end-to-end pipeline.
  j["pipeline_latency_sim_ms"] = {
      {"mean_ceiling", quantize_latency_ms(report.latency.mean_ms)},
      {"p99_ceiling", quantize_latency_ms(report.latency.p99_ms)},
  };
  j["total_time_s"] = report.total_time_s;
  j["ideal_time_s"] = report.ideal_time_s;
  j["frames"] = report.frames;
  j["intrusion_events"] = report.intrusion_events;
  j["collision_events"] = report.collision_events;
  j["seed"] = report.seed;
  j["command_timeline"] = ordered_json::array();
  for (const CommandOutput& cmd : report.command_timeline) {
    ordered_json c;
    c["t"] = cmd.timestamp;
    c["kind"] = cmd.kind == CommandOutput::Kind::Halt ? "halt" : "duration";
    if (cmd.kind == CommandOutput::Kind::Duration) {
      c["duration_s"] = cmd.duration;
    }
    c["mode"] = mode_name(cmd.mode);
    c["interrupt"] = cmd.interrupt;
    j["command_timeline"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

std::string comparison_table_text(const ComparisonResult& result, double normal_speed) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %8s %8s %19s %15s\n", "method", "OE (%)", "CAR (%)",
                "latency p99 (ms)", "max step ratio");
  out += line;
  for (const MetricsReport& r : result.reports) {
    const double ratio = max_step_ratio(r.velocity_profile, normal_speed);
    std::snprintf(line, sizeof(line), "%-16s %8.2f %8.2f %19s %15.4f\n", method_name(r.method),
                  r.operational_efficiency_pct, r.collision_avoidance_rate_pct,
                  ("<= " + format("%.1f", quantize_latency_ms(r.latency.p99_ms))).c_str(),
                  ratio);
    out += line;
  }
  return out;
}

std::string comparison_table_csv(const ComparisonResult& result, double normal_speed) {
  std::string out = "method,oe_pct,car_pct,latency_mean_ms_ceiling,latency_p99_ms_ceiling,"
                    "max_step_ratio,total_time_s,frames,intrusion_events,collision_events\n";
  char line[256];
  for (const MetricsReport& r : result.reports) {
    const double ratio = max_step_ratio(r.velocity_profile, normal_speed);
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.1f,%.1f,%.6f,%.3f,%llu,%llu,%llu\n",
                  method_name(r.method), r.operational_efficiency_pct,
                  r.collision_avoidance_rate_pct, quantize_latency_ms(r.latency.mean_ms),
                  quantize_latency_ms(r.latency.p99_ms), ratio, r.total_time_s,
                  static_cast<unsigned long long>(r.frames),
                  static_cast<unsigned long long>(r.intrusion_events),
                  static_cast<unsigned long long>(r.collision_events));
    out += line;
  }
  return out;
}

std::string velocity_profile_csv(std::span<const VelocitySample> profile) {
  std::string out = "t,speed,mode\n";
  char line[96];
  for (const VelocitySample& s : profile) {
    std::snprintf(line, sizeof(line), "%.3f,%.9f,%s\n", s.t, s.speed, mode_name(s.mode));
    out += line;
  }
  return out;
}

std::string latency_detail_text(const MetricsReport& report) {
  char line[192];
  std::snprintf(line, sizeof(line),
                "%s: measured pipeline latency (sim, compute only) mean=%.4f ms p99=%.4f ms "
                "over %llu frames\n",
                method_name(report.method), report.latency.mean_ms, report.latency.p99_ms,
                static_cast<unsigned long long>(report.frames));
  return line;
}

} // namespace vfence
