#include "vfence/config.hpp"
#include "vfence/errors.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vfence {

namespace {

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(std::string(value), &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    if (!std::isfinite(v)) {
      throw std::invalid_argument("not finite");
    }
    return v;
  } catch (const std::exception&) {
    throw ParseError("config: value '" + std::string(value) + "' for key '" + std::string(key) +
                     "' is not a finite number");
  }
}

unsigned parse_unsigned(std::string_view key, std::string_view value) {
  unsigned v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ParseError("config: value '" + std::string(value) + "' for key '" + std::string(key) +
                     "' is not a nonnegative integer");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

} // namespace

void validate(const RunConfig& cfg) {
  validate(cfg.supervisor);
  if (!(cfg.frame_width > 0.0) || !(cfg.frame_height > 0.0)) {
    throw DomainError("config: frame dimensions must be positive");
  }
  if (!(cfg.frame_period_ms > 0.0) || !(cfg.sim_step_ms > 0.0)) {
    throw DomainError("config: frame_period_ms and sim_step_ms must be positive");
  }
  if (cfg.sim_step_ms > cfg.frame_period_ms) {
    throw DomainError("config: sim_step_ms must not exceed frame_period_ms");
  }
  if (cfg.latency_budget_ms < 0.0) {
    throw DomainError("config: latency_budget_ms must be nonnegative");
  }
  if (cfg.n_candidates == 0) {
    throw DomainError("config: n_candidates must be positive");
  }
  if (!(cfg.person_width > 0.0) || !(cfg.person_height > 0.0)) {
    throw DomainError("config: person box must have positive extent");
  }
  if (!(cfg.person_confidence > 0.0 && cfg.person_confidence < 1.0)) {
    throw DomainError("config: person_confidence must lie strictly inside (0,1)");
  }
  if (cfg.person_confidence <= cfg.supervisor.tau) {
    throw DomainError("config: person_confidence must exceed tau or no person is ever detected");
  }
  if (!(cfg.wall_timeout_s > 0.0)) {
    throw DomainError("config: wall_timeout_s must be positive");
  }
  const std::size_t needed = 1 + static_cast<std::size_t>(cfg.duplicates);
  if (needed > cfg.n_candidates) {
    throw DomainError("config: duplicates exceed available tensor candidates");
  }
}

void apply_config_entry(RunConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "tau") {
    cfg.supervisor.tau = parse_double(key, value);
  } else if (key == "t_buffer_s") {
    cfg.supervisor.t_buffer_s = parse_double(key, value);
  } else if (key == "alpha") {
    cfg.supervisor.alpha = parse_double(key, value);
  } else if (key == "beta") {
    cfg.supervisor.beta = parse_double(key, value);
  } else if (key == "d_min") {
    cfg.supervisor.d_min = parse_double(key, value);
  } else if (key == "d_max") {
    cfg.supervisor.d_max = parse_double(key, value);
  } else if (key == "d_desired_normal") {
    cfg.supervisor.d_desired_normal = parse_double(key, value);
  } else if (key == "d_desired_slow") {
    cfg.supervisor.d_desired_slow = parse_double(key, value);
  } else if (key == "nms_iou") {
    cfg.supervisor.nms_iou = parse_double(key, value);
  } else if (key == "frame_width") {
    cfg.frame_width = parse_double(key, value);
  } else if (key == "frame_height") {
    cfg.frame_height = parse_double(key, value);
  } else if (key == "frame_period_ms") {
    cfg.frame_period_ms = parse_double(key, value);
  } else if (key == "sim_step_ms") {
    cfg.sim_step_ms = parse_double(key, value);
  } else if (key == "latency_budget_ms") {
    cfg.latency_budget_ms = parse_double(key, value);
  } else if (key == "n_candidates") {
    cfg.n_candidates = parse_unsigned(key, value);
  } else if (key == "person_width") {
    cfg.person_width = parse_double(key, value);
  } else if (key == "person_height") {
    cfg.person_height = parse_double(key, value);
  } else if (key == "person_confidence") {
    cfg.person_confidence = parse_double(key, value);
  } else if (key == "duplicates") {
    cfg.duplicates = parse_unsigned(key, value);
  } else if (key == "wall_timeout_s") {
    cfg.wall_timeout_s = parse_double(key, value);
  } else if (key == "out_dir") {
    cfg.out_dir = std::string(value);
  } else {
    throw ParseError("config: unknown key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
  RunConfig cfg = base;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view line =
        text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("config: cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), base);
}

} // namespace vfence
