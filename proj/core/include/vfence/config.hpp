#pragma once

#include "vfence/supervisor.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace vfence {

/// Everything a simulated run needs beyond the scenario script itself.
/// Defaults reproduce the reference operating point; any field can be
/// overridden by a config file and again by command-line flags.
struct RunConfig {
  SupervisorConfig supervisor;

  double frame_width = 1280.0;
  double frame_height = 720.0;
  double frame_period_ms = 33.0;
  double sim_step_ms = 1.0;
  double latency_budget_ms = 66.0;

  /// Candidate columns in synthesized tensors.
  unsigned n_candidates = 128;

  /// Synthesized person box, pixels.
  double person_width = 120.0;
  double person_height = 400.0;
  double person_confidence = 0.9;
  unsigned duplicates = 0;

  /// Non-termination guard for scenarios that never let the robot finish.
  double wall_timeout_s = 30.0;

  std::string out_dir = ".";
};

void validate(const RunConfig& cfg);

/// Applies one `key=value` entry. Shared by the file parser and the CLI so
/// both spell keys identically. Throws ParseError for unknown keys or
/// unparseable values, naming the offending key.
void apply_config_entry(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses a plain-text config: one `key=value` per line, `#` comments and
/// blank lines ignored.
RunConfig parse_config(std::string_view text, const RunConfig& base = {});

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = {});

} // namespace vfence
