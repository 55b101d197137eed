#include <benchmark/benchmark.h>

#include "cocoflow/diagnostics.hpp"
#include "cocoflow/discrete.hpp"
#include "cocoflow/dynamics.hpp"
#include "cocoflow/experiment.hpp"
#include "cocoflow/operators.hpp"

using namespace cocoflow;

namespace {

SystemSpec lasso_system(double eta_multiple) {
  const LassoFixture fx = make_lasso_fixture();
  const SmoothConvex g = least_squares_objective(fx.M, fx.y);
  return SystemSpec::prox_gradient(l1_norm(10, fx.weight), g, eta_multiple * g.beta);
}

}  // namespace

static void BM_IntegrateOscillator(benchmark::State& state) {
  const SystemSpec spec =
      SystemSpec::gradient(quadratic_objective(Matrix::Identity(1, 1), Vector::Zero(1)));
  const Schedule s = constant_schedule(3.0, 1.0);
  IntegratorConfig cfg;
  cfg.horizon = static_cast<double>(state.range(0));
  Vector u0(1), v0(1);
  u0 << 1.0;
  v0 << 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(spec, s, u0, v0, cfg));
  }
}
BENCHMARK(BM_IntegrateOscillator)->Arg(10)->Arg(50);

static void BM_IntegrateLassoFb(benchmark::State& state) {
  const SystemSpec spec = lasso_system(1.0);
  const Schedule s = constant_schedule(2.0, 2.0);
  IntegratorConfig cfg;
  cfg.horizon = 10.0;
  const Vector zero = Vector::Zero(10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(spec, s, zero, zero, cfg));
  }
}
BENCHMARK(BM_IntegrateLassoFb);

static void BM_InertialFbLasso(benchmark::State& state) {
  const LassoFixture fx = make_lasso_fixture();
  const SmoothConvex g = least_squares_objective(fx.M, fx.y);
  const ProxFunction f = l1_norm(10, fx.weight);
  const InertialFBConfig cfg = InertialFBConfig::constant(g.beta, 1.0, 2.0, 5000, 1e-8);
  const Vector zero = Vector::Zero(10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_inertial_fb(f, g, cfg, zero, zero));
  }
}
BENCHMARK(BM_InertialFbLasso);

static void BM_LyapunovTrace(benchmark::State& state) {
  const SmoothConvex g = quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  const Schedule s = constant_schedule(2.0, 0.5);
  IntegratorConfig cfg;
  Vector u0(2);
  u0 << 1.0, 0.0;
  const Trajectory traj = integrate(SystemSpec::gradient(g), s, u0, Vector::Zero(2), cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lyapunov_a1(traj, s, 1.0, Vector::Zero(2)));
  }
}
BENCHMARK(BM_LyapunovTrace);
