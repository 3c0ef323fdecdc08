#include "vfence/config.hpp"
#include "vfence/errors.hpp"
#include "vfence/postproc.hpp"
#include "vfence/qp.hpp"
#include "vfence/scenario.hpp"
#include "vfence/tensor.hpp"
#include "vfence/zones.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

using vfence::RunConfig;

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) {
    throw vfence::IoError("cannot open '" + path.string() + "' for writing");
  }
  out << content;
  if (!out) {
    throw vfence::IoError("write to '" + path.string() + "' failed");
  }
}

/// Deferred key=value overrides so the precedence stays
/// defaults < config file < command-line flags.
struct ConfigCli {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file applied over the defaults");
    const std::pair<const char*, const char*> keys[] = {
        {"tau", "detection score threshold (default 0.65)"},
        {"t_buffer_s", "seconds without detections before relaxing to normal (default 3.0)"},
        {"alpha", "weight pulling the duration toward its target (default 1.0)"},
        {"beta", "weight penalizing change from the previous duration (default 0.85)"},
        {"d_min", "duration lower bound, seconds (default 4.0)"},
        {"d_max", "duration upper bound, seconds (default 11.0)"},
        {"d_desired_normal", "normal-mode leg duration target, seconds (default 5.0)"},
        {"d_desired_slow", "slow-mode leg duration target, seconds (default 10.0)"},
        {"nms_iou", "duplicate-suppression overlap threshold (default 0.45)"},
        {"frame_width", "camera frame width, pixels (default 1280)"},
        {"frame_height", "camera frame height, pixels (default 720)"},
        {"frame_period_ms", "sensor frame period, milliseconds (default 33)"},
        {"sim_step_ms", "simulation step, milliseconds (default 1)"},
        {"latency_budget_ms", "collision grace window, milliseconds (default 66)"},
        {"n_candidates", "candidate columns in synthesized tensors (default 128)"},
        {"person_width", "synthesized person box width, pixels (default 120)"},
        {"person_height", "synthesized person box height, pixels (default 400)"},
        {"person_confidence", "synthesized person confidence (default 0.9)"},
        {"duplicates", "extra near-copies per synthesized person (default 0)"},
        {"wall_timeout_s", "wall-clock cap per simulated run, seconds (default 30)"},
        {"out_dir", "directory for report files (default .)"},
    };
    for (const auto& [key, help] : keys) {
      std::string flag = "--";
      for (const char* p = key; *p; ++p) {
        flag += *p == '_' ? '-' : *p;
      }
      cmd->add_option_function<std::string>(
             flag,
             [this, key = std::string(key)](const std::string& value) {
               overrides.emplace_back(key, value);
             },
             help)
          ->type_name("VALUE");
    }
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = vfence::load_config(config_path, cfg);
    }
    for (const auto& [key, value] : overrides) {
      vfence::apply_config_entry(cfg, key, value);
    }
    vfence::validate(cfg);
    return cfg;
  }
};

void emit_report_files(const RunConfig& cfg, const vfence::MetricsReport& report) {
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  const std::string name = vfence::method_name(report.method);
  write_text_file(dir / ("metrics_" + name + ".json"), vfence::metrics_to_json(report));
  write_text_file(dir / ("velocity_" + name + ".csv"),
                  vfence::velocity_profile_csv(report.velocity_profile));
  std::cerr << vfence::latency_detail_text(report);
}

int run_postproc(const std::string& input, double tau, double nms_iou, bool no_nms) {
  const vfence::DetectionFrameTensor tensor = vfence::read_tensor(input);
  vfence::PostprocConfig pc;
  pc.tau = tau;
  if (no_nms) {
    pc.nms_iou.reset();
  } else {
    pc.nms_iou = nms_iou;
  }
  const auto detections = vfence::decode(tensor, pc);
  const vfence::ZoneLayout layout(static_cast<double>(tensor.frame_width));
  for (const auto& d : detections) {
    nlohmann::ordered_json j;
    j["x1"] = d.x1;
    j["y1"] = d.y1;
    j["x2"] = d.x2;
    j["y2"] = d.y2;
    j["score"] = d.score;
    j["zone"] = vfence::zone_name(vfence::classify_detection(d, layout));
    std::cout << j.dump() << "\n";
  }
  return 0;
}

int run_solve(const vfence::QpParams& params, double tol, int max_iter) {
  const vfence::DurationSolution sol = vfence::solve_sqp(params, tol, max_iter);
  nlohmann::ordered_json j;
  j["d_star"] = sol.d_star;
  j["lambda_lo"] = sol.lambda_lo;
  j["lambda_hi"] = sol.lambda_hi;
  j["iterations"] = sol.iterations;
  j["kkt_residual"] = sol.kkt_residual;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_run(const ConfigCli& cc, const std::string& scenario_path, const std::string& method_str,
            std::uint64_t seed) {
  const RunConfig cfg = cc.resolve();
  const vfence::ScenarioScript script = vfence::load_scenario(scenario_path);
  const vfence::MethodKind method = vfence::method_from_name(method_str);
  const vfence::MetricsReport report = vfence::run(script, method, cfg, seed);
  emit_report_files(cfg, report);
  std::cout << vfence::metrics_to_json(report);
  return 0;
}

int run_compare(const ConfigCli& cc, const std::string& scenario_path, std::uint64_t seed) {
  const RunConfig cfg = cc.resolve();
  const vfence::ScenarioScript script = vfence::load_scenario(scenario_path);
  const vfence::ComparisonResult result = vfence::compare(script, cfg, seed);

  const double normal_speed = 1.0 / cfg.supervisor.d_desired_normal;
  const std::string table = vfence::comparison_table_text(result, normal_speed);
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  write_text_file(dir / "comparison.txt", table);
  write_text_file(dir / "comparison.csv", vfence::comparison_table_csv(result, normal_speed));
  for (const auto& report : result.reports) {
    emit_report_files(cfg, report);
  }
  std::cout << table;
  return 0;
}

int run_synth(const std::string& output, const ConfigCli& cc, double center_x, double center_y,
              bool has_person, double background_logit) {
  const RunConfig cfg = cc.resolve();
  std::vector<vfence::GroundTruthPerson> persons;
  if (has_person) {
    const double cy = center_y >= 0.0 ? center_y : cfg.frame_height / 2.0;
    persons.push_back(vfence::GroundTruthPerson{center_x, cy, cfg.person_width,
                                                cfg.person_height, cfg.person_confidence});
  }
  const auto tensor = vfence::synthesize_tensor(
      persons, cfg.n_candidates, static_cast<std::uint32_t>(cfg.frame_width),
      static_cast<std::uint32_t>(cfg.frame_height), background_logit, cfg.duplicates);
  vfence::write_tensor(tensor, output);
  std::cerr << "wrote " << tensor.n_candidates << "-candidate tensor to " << output << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual-fencing safeguarding pipeline: decode detections, classify safety "
               "zones, smooth motion durations, and replay scripted scenarios"};
  app.require_subcommand(1);

  // postproc
  auto* postproc = app.add_subcommand("postproc", "decode a raw tensor file into detections");
  std::string pp_input;
  double pp_tau = 0.65;
  double pp_nms = 0.45;
  bool pp_no_nms = false;
  postproc->add_option("--input", pp_input, "tensor file to decode")->required();
  postproc->add_option("--tau", pp_tau, "detection score threshold (default 0.65)");
  postproc->add_option("--nms-iou", pp_nms,
                       "duplicate-suppression overlap threshold (default 0.45)");
  postproc->add_flag("--no-nms", pp_no_nms, "disable duplicate suppression");

  // solve
  auto* solve = app.add_subcommand("solve", "solve one duration-smoothing program");
  vfence::QpParams qp;
  double so_tol = vfence::kDefaultTol;
  int so_max_iter = vfence::kDefaultMaxIter;
  solve->add_option("--alpha", qp.alpha, "target-tracking weight (default 1.0)");
  solve->add_option("--beta", qp.beta, "change-penalty weight (default 0.85)");
  solve->add_option("--d-desired", qp.d_desired, "duration target, seconds")->required();
  solve->add_option("--d-prev", qp.d_prev, "previous duration, seconds")->required();
  solve->add_option("--d-min", qp.d_min, "duration lower bound (default 4.0)");
  solve->add_option("--d-max", qp.d_max, "duration upper bound (default 11.0)");
  solve->add_option("--tol", so_tol, "optimality tolerance (default 1e-8)");
  solve->add_option("--max-iter", so_max_iter, "iteration cap (default 50)");

  // run
  auto* run_cmd = app.add_subcommand("run", "replay a scenario against one method");
  std::string run_scenario;
  std::string run_method;
  std::uint64_t run_seed = 0;
  ConfigCli run_cc;
  run_cmd->add_option("--scenario", run_scenario, "scenario JSON file")->required();
  run_cmd
      ->add_option("--method", run_method,
                   "safeguarding method: immediate_stop, zone_based, or zone_based_sqp")
      ->required()
      ->check(CLI::IsMember({"immediate_stop", "zone_based", "zone_based_sqp"}));
  run_cmd->add_option("--seed", run_seed, "recorded in the report (default 0)");
  run_cc.add_flags(run_cmd);

  // compare
  auto* compare_cmd =
      app.add_subcommand("compare", "replay a scenario against all three methods");
  std::string cmp_scenario;
  std::uint64_t cmp_seed = 0;
  ConfigCli cmp_cc;
  compare_cmd->add_option("--scenario", cmp_scenario, "scenario JSON file")->required();
  compare_cmd->add_option("--seed", cmp_seed, "recorded in the reports (default 0)");
  cmp_cc.add_flags(compare_cmd);

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic tensor file");
  std::string sy_output;
  double sy_center_x = 0.0;
  double sy_center_y = -1.0;
  double sy_background = -4.0;
  ConfigCli sy_cc;
  synth->add_option("--output", sy_output, "tensor file to write")->required();
  auto* sy_cx = synth->add_option("--center-x", sy_center_x,
                                  "person center x, pixels; omit for an empty frame");
  synth->add_option("--center-y", sy_center_y,
                    "person center y, pixels (default: frame middle)");
  synth->add_option("--background-logit", sy_background,
                    "class logit for empty candidates (default -4.0)");
  sy_cc.add_flags(synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (postproc->parsed()) {
      return run_postproc(pp_input, pp_tau, pp_nms, pp_no_nms);
    }
    if (solve->parsed()) {
      return run_solve(qp, so_tol, so_max_iter);
    }
    if (run_cmd->parsed()) {
      return run_run(run_cc, run_scenario, run_method, run_seed);
    }
    if (compare_cmd->parsed()) {
      return run_compare(cmp_cc, cmp_scenario, cmp_seed);
    }
    if (synth->parsed()) {
      return run_synth(sy_output, sy_cc, sy_center_x, sy_center_y, sy_cx->count() > 0,
                       sy_background);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
