#include <benchmark/benchmark.h>

#include "hgap/sde.hpp"
#include "hgap/smalldev.hpp"

using namespace hgap;

namespace {

Execution execution(std::int64_t threads) {
  Execution ex;
  ex.serial = threads == 0;
  ex.threads = static_cast<int>(threads);
  return ex;
}

void BM_TerminalSamples(benchmark::State& state) {
  const auto s = build_generators(4, 3);
  SimulationOptions opt;
  opt.execution = execution(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(time_change_samples(s, 1.0, 1e-3, 1, 2000, opt));
  state.SetItemsProcessed(state.iterations() * 2000 * 1000);
}

void BM_ExitTimes(benchmark::State& state) {
  const auto s = build_generators(2, 1);
  ExitOptions opt;
  opt.execution = execution(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_exit_times(s, 1e-3, 2000, 2.0, 1, opt));
}

void BM_SmallBall(benchmark::State& state) {
  const auto s = build_generators(2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_small_ball(s, 1e-3, 2000, 1.5, 1, execution(state.range(0))));
}

}  // namespace

// Argument 0 is the serial reference loop; k > 0 is the OpenMP kernel with k workers.
BENCHMARK(BM_TerminalSamples)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExitTimes)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SmallBall)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
