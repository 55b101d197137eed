#include "cocoflow/diagnostics.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "cocoflow/operators.hpp"
#include "support/oracles.hpp"

using namespace cocoflow;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

SystemSpec oscillator_spec() {
  return SystemSpec::gradient(quadratic_objective(Matrix::Identity(1, 1), Vector::Zero(1)));
}

Trajectory oscillator_trajectory(double horizon = 20.0) {
  IntegratorConfig cfg;
  cfg.horizon = horizon;
  return integrate(oscillator_spec(), constant_schedule(3.0, 1.0), vec({1.0}), vec({0.0}), cfg);
}

Trajectory stationary_trajectory() {
  IntegratorConfig cfg;
  cfg.horizon = 12.0;
  const SmoothConvex g = quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  return integrate(SystemSpec::gradient(g), constant_schedule(2.0, 1.0), Vector::Zero(2),
                   Vector::Zero(2), cfg);
}

// Hand-assembled trajectory with x(t) = t * e1 on [0, 2].
Trajectory ramp_trajectory() {
  Trajectory traj;
  traj.reduced = zero_field(2);
  for (int i = 0; i <= 200; ++i) {
    const double t = 2.0 * i / 200.0;
    traj.times.push_back(t);
    traj.x.push_back(vec({t, 0.0}));
    traj.v.push_back(vec({1.0, 0.0}));
    traj.a.push_back(Vector::Zero(2));
    traj.field.push_back(Vector::Zero(2));
  }
  return traj;
}

}  // namespace

TEST(LyapunovA1, StationaryTrajectoryIsZero) {
  const Trajectory traj = stationary_trajectory();
  const LyapunovTrace trace = lyapunov_a1(traj, constant_schedule(2.0, 1.0), 1.0, Vector::Zero(2));
  for (double value : trace.values) EXPECT_EQ(value, 0.0);
  EXPECT_EQ(trace.max_uptick, 0.0);
}

TEST(LyapunovA1, OscillatorStartsAtThreeHalvesAndDecreases) {
  // V(0) = <x0 - x*, v0> + gamma/2 |x0 - x*|^2 + beta gamma/lambda |v0|^2
  //      = 0 + 3 * 0.5 + 0 = 1.5.
  const Trajectory traj = oscillator_trajectory();
  const Schedule s = constant_schedule(3.0, 1.0);
  const LyapunovTrace trace = lyapunov_a1(traj, s, 1.0, vec({0.0}));
  EXPECT_NEAR(trace.values.front(), 1.5, 1e-12);
  EXPECT_LE(trace.max_uptick, 1e-9);
  EXPECT_LT(trace.values.back(), trace.values.front());
  for (std::size_t i = 1; i < trace.values.size(); ++i)
    EXPECT_LE(trace.values[i], trace.values[i - 1] + 1e-12);
}

TEST(LyapunovA1, ZeroFieldAcceptsAnyCenter) {
  IntegratorConfig cfg;
  cfg.horizon = 5.0;
  const Trajectory traj = integrate(SystemSpec::cocoercive(zero_field(1)),
                                    constant_schedule(2.0, 1.0), vec({1.0}), vec({2.0}), cfg);
  for (double center : {-3.0, 0.0, 11.0}) {
    const LyapunovTrace trace =
        lyapunov_a1(traj, constant_schedule(2.0, 1.0), 1.0, vec({center}));
    EXPECT_LE(trace.max_uptick, 1e-9);
  }
}

TEST(LyapunovA1, RejectsNonZeroCenter) {
  const Trajectory traj = oscillator_trajectory(5.0);
  EXPECT_THROW(lyapunov_a1(traj, constant_schedule(3.0, 1.0), 1.0, vec({5.0})),
               PreconditionError);
}

TEST(EnergyA5, StationaryTrajectoryIsZero) {
  const SmoothConvex g = quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  const ProxFunction f = zero_function(2);
  IntegratorConfig cfg;
  cfg.horizon = 5.0;
  const SystemSpec spec = SystemSpec::prox_gradient(f, g, 1.0);
  const Trajectory traj =
      integrate(spec, constant_schedule(2.0, 1.0), Vector::Zero(2), Vector::Zero(2), cfg);
  const LyapunovTrace trace =
      energy_a5(traj, constant_schedule(2.0, 1.0), 1.0, g, Vector::Zero(2));
  for (double value : trace.values) EXPECT_EQ(value, 0.0);
}

TEST(EnergyA5, QuadraticDecreases) {
  const SmoothConvex g = quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  const ProxFunction f = zero_function(2);
  const double eta = 1.0;  // = beta
  const SystemSpec spec = SystemSpec::prox_gradient(f, g, eta);
  IntegratorConfig cfg;
  cfg.horizon = 30.0;
  const Schedule s = constant_schedule(2.0, 1.0);
  const Trajectory traj = integrate(spec, s, vec({1.0, -2.0}), Vector::Zero(2), cfg);
  const LyapunovTrace trace = energy_a5(traj, s, eta, g, Vector::Zero(2));
  EXPECT_LE(trace.max_uptick, 1e-9);
  EXPECT_LT(trace.values.back(), trace.values.front());
}

TEST(ErgodicAverage, ConstantTrajectory) {
  IntegratorConfig cfg;
  cfg.horizon = 4.0;
  const Trajectory traj = integrate(SystemSpec::cocoercive(zero_field(2)),
                                    constant_schedule(2.0, 1.0), vec({3.0, -1.0}),
                                    Vector::Zero(2), cfg);
  for (double T : {0.5, 1.0, 4.0}) {
    const Vector mean = ergodic_average(traj, T);
    EXPECT_NEAR(mean[0], 3.0, 1e-12);
    EXPECT_NEAR(mean[1], -1.0, 1e-12);
  }
}

TEST(ErgodicAverage, LinearRamp) {
  const Trajectory traj = ramp_trajectory();
  const Vector mean = ergodic_average(traj, 2.0);
  EXPECT_NEAR(mean[0], 1.0, 1e-12);
  EXPECT_NEAR(mean[1], 0.0, 1e-15);
}

TEST(ErgodicAverage, OscillatorMatchesAnalyticIntegral) {
  const Trajectory traj = oscillator_trajectory();
  const oracles::LinearOscillator closed(3.0, 1.0, 1.0, 0.0);
  const Vector mean = ergodic_average(traj, 20.0);
  EXPECT_NEAR(mean[0], closed.integral_x(20.0) / 20.0, 1e-8);
}

TEST(ErgodicAverage, RangeGuard) {
  const Trajectory traj = oscillator_trajectory(5.0);
  EXPECT_THROW(ergodic_average(traj, 5.1), std::out_of_range);
  EXPECT_THROW(ergodic_average(traj, 0.0), std::out_of_range);
}

TEST(RateBound, ConstantScheduleClosedForm) {
  // gamma = 2, lambda = 0.5, beta = 1, zeta = 1, u0 = (1,0), v0 = 0, x* = 0:
  // bound(T) = (|(2,0)|^2 + 0.5) / (2 T) = 2.25 / T.
  const Schedule s = constant_schedule(2.0, 0.5);
  for (double T : {1.0, 4.0, 10.0, 50.0}) {
    const double bound = rate_bound(s, 1.0, 1.0, vec({1.0, 0.0}), Vector::Zero(2),
                                    Vector::Zero(2), T);
    EXPECT_NEAR(bound, 2.25 / T, 1e-15 * (2.25 / T));
  }
}

TEST(RateBound, VanishesAtTheSolution) {
  const Schedule s = constant_schedule(2.0, 0.5);
  EXPECT_EQ(rate_bound(s, 1.0, 1.0, vec({1.0, 1.0}), Vector::Zero(2), vec({1.0, 1.0}), 7.0),
            0.0);
}

TEST(RateBound, ExponentialScheduleSubstitution) {
  // gamma(0) = 3, dgamma(0) = -0.5, lambda(0) = 0.5, beta = 1, zeta = 0.5,
  // u0 = [1], v0 = [0], T = 10 -> (1/10) (9 + 1) = 1.
  const Schedule s = exponential_schedule(1.0, 0.5, 1.0, 1.0, 0.5, 2.0);
  const double bound = rate_bound(s, 1.0, 0.5, vec({1.0}), vec({0.0}), vec({0.0}), 10.0);
  EXPECT_NEAR(bound, 1.0, 1e-12);
}

TEST(RateBound, ZetaDomain) {
  const Schedule s = constant_schedule(2.0, 0.5);  // zeta_star = 1
  EXPECT_THROW(rate_bound(s, 1.0, 0.0, vec({1.0}), vec({0.0}), vec({0.0}), 1.0), ParameterError);
  EXPECT_THROW(rate_bound(s, 1.0, -1.0, vec({1.0}), vec({0.0}), vec({0.0}), 1.0),
               ParameterError);
  EXPECT_THROW(rate_bound(s, 1.0, 1.5, vec({1.0}), vec({0.0}), vec({0.0}), 1.0), ParameterError);
  EXPECT_NO_THROW(rate_bound(s, 1.0, 1.0, vec({1.0}), vec({0.0}), vec({0.0}), 1.0));
}

TEST(RateBound, DoublingTHalvesExactly) {
  const Schedule s = constant_schedule(2.0, 0.5);
  const Vector u0 = vec({1.3, -0.4});
  for (double T : {0.7, 3.7, 25.0}) {
    const double b1 = rate_bound(s, 1.0, 1.0, u0, Vector::Zero(2), Vector::Zero(2), T);
    const double b2 = rate_bound(s, 1.0, 1.0, u0, Vector::Zero(2), Vector::Zero(2), 2.0 * T);
    EXPECT_EQ(b2, b1 / 2.0);
  }
}

TEST(FitTailSlope, ExactPowerLaws) {
  RateReport report;
  for (int i = 1; i <= 100; ++i) {
    const double T = 0.5 * i;
    report.T_grid.push_back(T);
    report.ergodic_gap.push_back(3.7 / T);
    report.bound.push_back(10.0 / T);
  }
  EXPECT_NEAR(fit_tail_slope(report, 0.5), -1.0, 1e-6);
  for (std::size_t i = 0; i < report.T_grid.size(); ++i)
    report.ergodic_gap[i] = 0.9 / (report.T_grid[i] * report.T_grid[i]);
  EXPECT_NEAR(fit_tail_slope(report, 0.5), -2.0, 1e-6);
}

TEST(FitTailSlope, DegenerateGaps) {
  RateReport report;
  for (int i = 1; i <= 10; ++i) {
    report.T_grid.push_back(i);
    report.ergodic_gap.push_back(0.0);
    report.bound.push_back(1.0 / i);
  }
  EXPECT_THROW(fit_tail_slope(report, 0.5), DegenerateFitError);
  EXPECT_THROW(fit_tail_slope(report, 0.0), ParameterError);
  EXPECT_THROW(fit_tail_slope(report, 1.0), ParameterError);
}

TEST(MakeRateReport, QuadraticRunDominatedByBound) {
  const SmoothConvex g = quadratic_objective(Matrix::Identity(2, 2), Vector::Zero(2));
  const Schedule s = constant_schedule(2.0, 0.5);
  IntegratorConfig cfg;
  const Trajectory traj =
      integrate(SystemSpec::gradient(g), s, vec({1.0, 0.0}), Vector::Zero(2), cfg);
  const RateReport report = make_rate_report(traj, s, g, 1.0, 1.0, Vector::Zero(2), 10);
  ASSERT_FALSE(report.T_grid.empty());
  for (std::size_t i = 0; i < report.T_grid.size(); ++i) {
    EXPECT_GE(report.ergodic_gap[i], -1e-10);
    EXPECT_LE(report.ergodic_gap[i], report.bound[i] + 1e-9);
  }
  EXPECT_LE(report.slope, -0.9);
}

TEST(FejerLimit, StationaryTrajectory) {
  const Trajectory traj = stationary_trajectory();
  const FejerCheck check = fejer_limit_check(traj, Vector::Zero(2), 3.0);
  EXPECT_EQ(check.limit_estimate, 0.0);
  EXPECT_EQ(check.tail_oscillation, 0.0);
}

TEST(FejerLimit, OscillatorConvergesToZero) {
  const Trajectory traj = oscillator_trajectory(40.0);
  const FejerCheck check = fejer_limit_check(traj, vec({0.0}), 5.0);
  EXPECT_LE(check.limit_estimate, 1e-6);
  // The spread over [35, 40] is governed by e^{-0.382 * 35} ~ 1.6e-6.
  EXPECT_LE(check.tail_oscillation, 1e-5);
}

TEST(FejerLimit, DistancePlateausAgainstDifferentZero) {
  // Q = diag(1, 0) has a line of zeros {x_1 = 0}; starting at (1, 1) with
  // zero velocity the trajectory settles at (0, 1). Measured against the
  // different zero (0, 0), the distance must plateau at 1.
  Matrix Q = Matrix::Zero(2, 2);
  Q(0, 0) = 1.0;
  const OperatorField field = quadratic_gradient_field(Q, Vector::Zero(2));
  IntegratorConfig cfg;
  cfg.horizon = 40.0;
  const Trajectory traj = integrate(SystemSpec::cocoercive(field), constant_schedule(2.0, 1.0),
                                    vec({1.0, 1.0}), Vector::Zero(2), cfg);
  const FejerCheck check = fejer_limit_check(traj, vec({0.0, 0.0}), 5.0);
  EXPECT_NEAR(check.limit_estimate, 1.0, 1e-6);
  EXPECT_LE(check.tail_oscillation, 1e-6);
  // The field takes one constant value across its zero set.
  EXPECT_EQ((field(vec({0.0, 1.0})) - field(vec({0.0, -4.0}))).norm(), 0.0);
}

TEST(FejerLimit, WindowGuard) {
  const Trajectory traj = oscillator_trajectory(5.0);
  EXPECT_THROW(fejer_limit_check(traj, vec({0.0}), 3.0), PreconditionError);
  EXPECT_THROW(fejer_limit_check(traj, vec({0.0}), 0.0), ParameterError);
}
