#include "vfence/config.hpp"
#include "vfence/postproc.hpp"
#include "vfence/qp.hpp"
#include "vfence/scenario.hpp"
#include "vfence/supervisor.hpp"
#include "vfence/tensor.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

using namespace vfence;

namespace {

std::vector<GroundTruthPerson> three_people() {
  return {
      GroundTruthPerson{160.0, 360.0, 120.0, 400.0, 0.9},
      GroundTruthPerson{640.0, 360.0, 120.0, 400.0, 0.85},
      GroundTruthPerson{1100.0, 360.0, 120.0, 400.0, 0.8},
  };
}

void BM_Decode(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const DetectionFrameTensor tensor = synthesize_tensor(three_people(), n, 1280, 720, -4.0, 2);
  const PostprocConfig pc;
  for (auto _ : state) {
    auto detections = decode(tensor, pc);
    benchmark::DoNotOptimize(detections);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Decode)->Arg(128)->Arg(1024)->Arg(8400);

void BM_SolveDuration(benchmark::State& state) {
  QpParams p;
  p.d_desired = 10.0;
  p.d_prev = 5.0;
  for (auto _ : state) {
    DurationSolution sol = solve_sqp(p);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_SolveDuration);

void BM_SupervisorStep(benchmark::State& state) {
  const SupervisorConfig cfg;
  const auto persons = three_people();
  const DetectionFrameTensor frame =
      synthesize_tensor({persons.data(), 1}, 128, 1280, 720, -4.0, 0);
  SupervisorState sup = reset(cfg);
  double t = 0.0;
  for (auto _ : state) {
    auto [next, cmd] = step(sup, frame, t, cfg);
    sup = next;
    benchmark::DoNotOptimize(cmd);
    t += 0.033;
  }
}
BENCHMARK(BM_SupervisorStep);

void BM_ScenarioRun(benchmark::State& state) {
  ScenarioScript script;
  script.total_cycles = 1;
  script.frame_width = 1280.0;
  const RunConfig cfg;
  for (auto _ : state) {
    MetricsReport report = run(script, MethodKind::ZoneBasedSqp, cfg);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_ScenarioRun)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
