#include <benchmark/benchmark.h>

#include "cocoflow/experiment.hpp"
#include "cocoflow/operators.hpp"
#include "cocoflow/rng.hpp"

using namespace cocoflow;

namespace {

struct LassoParts {
  SmoothConvex g;
  ProxFunction f;
  OperatorField fb;
};

LassoParts lasso_parts() {
  const LassoFixture fx = make_lasso_fixture();
  LassoParts parts{least_squares_objective(fx.M, fx.y), l1_norm(10, fx.weight), OperatorField{}};
  parts.fb = fb_residual(parts.f, gradient_field(parts.g), parts.g.beta);
  return parts;
}

}  // namespace

static void BM_FbResidualEval(benchmark::State& state) {
  const LassoParts parts = lasso_parts();
  SampleRng rng(1);
  const Vector x = rng.in_ball(10, 5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parts.fb.eval(x));
  }
}
BENCHMARK(BM_FbResidualEval);

static void BM_SoftThreshold(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SampleRng rng(2);
  const Vector x = rng.in_ball(n, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(soft_threshold(0.5, 0.1, x));
  }
}
BENCHMARK(BM_SoftThreshold)->Arg(10)->Arg(100)->Arg(1000);

static void BM_CheckCocoercivity(benchmark::State& state) {
  const LassoParts parts = lasso_parts();
  const int samples = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_cocoercivity(parts.fb, samples, 10.0, 42));
  }
}
BENCHMARK(BM_CheckCocoercivity)->Arg(100)->Arg(1000);

static void BM_PowerIterationLmax(benchmark::State& state) {
  const LassoFixture fx = make_lasso_fixture();
  const Matrix gram = fx.M.transpose() * fx.M;
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_iteration_lmax(gram));
  }
}
BENCHMARK(BM_PowerIterationLmax);
