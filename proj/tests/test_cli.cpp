#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "util.hpp"

namespace {

std::string env_or_fail(const char* name) {
  const char* value = std::getenv(name);
  REQUIRE_MESSAGE(value != nullptr, name << " must be set by the test harness");
  return value;
}

std::string cli() { return env_or_fail("VFENCE_CLI"); }

std::string scenario(const std::string& name) {
  return (std::filesystem::path(env_or_fail("VFENCE_SCENARIO_DIR")) / name).string();
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      lines.push_back(line);
    }
  }
  return lines;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("solve prints the solution as JSON") {
  const auto r = testutil::run_command(cli() + " solve --d-desired 10 --d-prev 5");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["d_star"].get<double>() == doctest::Approx(7.702702702702703).epsilon(1e-12));
  CHECK(j["lambda_lo"].get<double>() == 0.0);
  CHECK(j["lambda_hi"].get<double>() == 0.0);
  CHECK(j["iterations"].get<int>() >= 1);
  CHECK(j["kkt_residual"].get<double>() <= 1e-8);
}

TEST_CASE("solve clamps to the bounds and reports the active multiplier") {
  const auto r = testutil::run_command(cli() + " solve --d-desired 12 --d-prev 11.5");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["d_star"].get<double>() == 11.0);
  CHECK(j["lambda_hi"].get<double>() == doctest::Approx(2.85).epsilon(1e-12));
  CHECK(j["lambda_lo"].get<double>() == 0.0);
}

TEST_CASE("synth then postproc recovers the scripted person") {
  testutil::TempDir dir("cli_synth");
  const std::string tensor = dir.file("frame.bin").string();
  const auto s = testutil::run_command(cli() + " synth --output " + quoted(tensor) +
                                       " --center-x 640 2>/dev/null");
  REQUIRE(s.exit_code == 0);

  const auto p = testutil::run_command(cli() + " postproc --input " + quoted(tensor));
  REQUIRE(p.exit_code == 0);
  const auto detections = lines_of(p.output);
  REQUIRE(detections.size() == 1);
  const auto j = nlohmann::json::parse(detections[0]);
  CHECK(j["x1"].get<double>() == doctest::Approx(580.0).epsilon(1e-9));
  CHECK(j["x2"].get<double>() == doctest::Approx(700.0).epsilon(1e-9));
  CHECK(j["y1"].get<double>() == doctest::Approx(160.0).epsilon(1e-9));
  CHECK(j["y2"].get<double>() == doctest::Approx(560.0).epsilon(1e-9));
  CHECK(j["score"].get<double>() == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(j["zone"].get<std::string>() == "critical");
}

TEST_CASE("synth without a person yields no detections") {
  testutil::TempDir dir("cli_synth_empty");
  const std::string tensor = dir.file("empty.bin").string();
  const auto s =
      testutil::run_command(cli() + " synth --output " + quoted(tensor) + " 2>/dev/null");
  REQUIRE(s.exit_code == 0);
  const auto p = testutil::run_command(cli() + " postproc --input " + quoted(tensor));
  REQUIRE(p.exit_code == 0);
  CHECK(lines_of(p.output).empty());
}

TEST_CASE("run writes a report and prints metrics") {
  testutil::TempDir dir("cli_run");
  const auto r = testutil::run_command(cli() + " run --scenario " +
                                       quoted(scenario("empty.json")) +
                                       " --method zone_based_sqp --out-dir " +
                                       quoted(dir.path().string()) + " 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["method"].get<std::string>() == "zone_based_sqp");
  CHECK(j["operational_efficiency_pct"].get<double>() == doctest::Approx(100.0).epsilon(0.002));
  CHECK(j["collision_avoidance_rate_pct"].get<double>() == 100.0);
  CHECK(std::filesystem::exists(dir.file("metrics_zone_based_sqp.json")));
  CHECK(std::filesystem::exists(dir.file("velocity_zone_based_sqp.csv")));
  const std::string csv = testutil::read_file(dir.file("velocity_zone_based_sqp.csv"));
  CHECK(csv.rfind("t,speed,mode\n", 0) == 0);
}

TEST_CASE("flags override the config file") {
  testutil::TempDir dir("cli_config");
  // tau above the synthetic confidence makes the config invalid on its own.
  testutil::write_file(dir.file("run.cfg"), "# aggressive threshold\ntau = 0.95\n");
  const std::string base = cli() + " run --scenario " + quoted(scenario("empty.json")) +
                           " --method zone_based --config " +
                           quoted(dir.file("run.cfg").string()) + " --out-dir " +
                           quoted(dir.path().string());
  const auto rejected = testutil::run_command(base + " 2>/dev/null");
  CHECK(rejected.exit_code == 2);
  const auto rescued = testutil::run_command(base + " --tau 0.6 2>/dev/null");
  CHECK(rescued.exit_code == 0);
}

TEST_CASE("compare prints the ranking table and writes every report file") {
  testutil::TempDir dir("cli_compare");
  const auto r = testutil::run_command(
      cli() + " compare --scenario " + quoted(scenario("empty.json")) + " --out-dir " +
      quoted(dir.path().string()) + " 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("method") != std::string::npos);
  CHECK(r.output.find("immediate_stop") != std::string::npos);
  CHECK(r.output.find("zone_based") != std::string::npos);
  CHECK(r.output.find("zone_based_sqp") != std::string::npos);
  for (const char* name : {"comparison.txt", "comparison.csv", "metrics_immediate_stop.json",
                           "metrics_zone_based.json", "metrics_zone_based_sqp.json",
                           "velocity_immediate_stop.csv", "velocity_zone_based.csv",
                           "velocity_zone_based_sqp.csv"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir.file(name)), name);
  }
}

TEST_CASE("repeat comparisons are byte-identical") {
  testutil::TempDir a("cli_rep_a");
  testutil::TempDir b("cli_rep_b");
  const std::string base =
      cli() + " compare --scenario " + quoted(scenario("empty.json")) + " --out-dir ";
  const auto ra = testutil::run_command(base + quoted(a.path().string()) + " 2>/dev/null");
  const auto rb = testutil::run_command(base + quoted(b.path().string()) + " 2>/dev/null");
  REQUIRE(ra.exit_code == 0);
  REQUIRE(rb.exit_code == 0);
  CHECK(ra.output == rb.output);
  for (const char* name : {"comparison.txt", "comparison.csv", "metrics_immediate_stop.json",
                           "metrics_zone_based.json", "metrics_zone_based_sqp.json",
                           "velocity_immediate_stop.csv", "velocity_zone_based.csv",
                           "velocity_zone_based_sqp.csv"}) {
    CHECK_MESSAGE(testutil::read_file(a.file(name)) == testutil::read_file(b.file(name)), name);
  }
}

TEST_CASE("usage errors exit with 1") {
  const auto unknown = testutil::run_command(cli() + " frobnicate 2>/dev/null");
  CHECK(unknown.exit_code == 1);
  const auto missing = testutil::run_command(cli() + " run 2>/dev/null");
  CHECK(missing.exit_code == 1);
  const auto bad_flag = testutil::run_command(cli() + " solve --warp 9 2>/dev/null");
  CHECK(bad_flag.exit_code == 1);
  const auto bad_method = testutil::run_command(
      cli() + " run --scenario x.json --method teleport 2>/dev/null");
  CHECK(bad_method.exit_code == 1);
}

TEST_CASE("runtime failures exit with 2 and explain themselves") {
  testutil::TempDir dir("cli_fail");
  const std::string log = dir.file("err.txt").string();
  const auto missing_file = testutil::run_command(
      cli() + " run --scenario /no/such/file.json --method zone_based 2>" + quoted(log));
  CHECK(missing_file.exit_code == 2);
  const std::string err = testutil::read_file(log);
  CHECK(err.rfind("error:", 0) == 0);

  const auto bad_tensor = testutil::run_command(cli() + " postproc --input /no/such.bin 2>/dev/null");
  CHECK(bad_tensor.exit_code == 2);
}

TEST_CASE("help lists the subcommands") {
  const auto r = testutil::run_command(cli() + " --help");
  REQUIRE(r.exit_code == 0);
  for (const char* sub : {"postproc", "solve", "run", "compare", "synth"}) {
    CHECK_MESSAGE(r.output.find(sub) != std::string::npos, sub);
  }
}

} // TEST_SUITE

