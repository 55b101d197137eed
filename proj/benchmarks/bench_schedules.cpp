#include <benchmark/benchmark.h>

#include "cocoflow/schedules.hpp"

using namespace cocoflow;

static void BM_ValidateA1Exponential(benchmark::State& state) {
  const Schedule s = exponential_schedule(1.0, 0.5, 1.0, 1.0, 0.5, 2.0);
  const TimeGrid grid{50.0, static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(validate_a1(s, 1.0, grid));
  }
}
BENCHMARK(BM_ValidateA1Exponential)->Arg(2000)->Arg(20000);

static void BM_ValidateA6Exponential(benchmark::State& state) {
  const Schedule s = exponential_schedule(1.0, 0.5, 1.0, 1.0, 0.5, 2.0);
  const TimeGrid grid{50.0, 2000};
  for (auto _ : state) {
    benchmark::DoNotOptimize(validate_a6(s, grid));
  }
}
BENCHMARK(BM_ValidateA6Exponential);

static void BM_ScheduleEval(benchmark::State& state) {
  const Schedule s = exponential_schedule(1.0, 0.5, 1.0, 1.0, 0.5, 2.0);
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-3;
    benchmark::DoNotOptimize(s.lambda(t) + s.gamma(t));
  }
}
BENCHMARK(BM_ScheduleEval);

BENCHMARK_MAIN();
