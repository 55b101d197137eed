#include "cocoflow/dynamics.hpp"

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

// The damped oscillator of the fidelity criterion: x'' + 3 x' + x = 0.
Trajectory run_oscillator(double step, double horizon = 20.0) {
  IntegratorConfig cfg;
  cfg.step = step;
  cfg.record_every = std::max(0.01, step);
  cfg.horizon = horizon;
  return integrate(oscillator_spec(), constant_schedule(3.0, 1.0), vec({1.0}), vec({0.0}), cfg);
}

double oscillator_max_error(const Trajectory& traj) {
  const oracles::LinearOscillator closed(3.0, 1.0, 1.0, 0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    err = std::max(err, std::abs(traj.x[i][0] - closed.x(traj.times[i])));
  return err;
}

}  // namespace

TEST(PhaseRhs, ZeroField) {
  const SystemSpec spec = SystemSpec::cocoercive(zero_field(1));
  const auto [dx, dv] = phase_rhs(spec, constant_schedule(2.0, 1.0), 0.0, vec({1.0}), vec({3.0}));
  EXPECT_EQ(dx[0], 3.0);
  EXPECT_EQ(dv[0], -6.0);
}

TEST(PhaseRhs, IdentityField) {
  const auto [dx, dv] =
      phase_rhs(oscillator_spec(), constant_schedule(3.0, 1.0), 0.0, vec({1.0}), vec({0.0}));
  EXPECT_EQ(dx[0], 0.0);
  EXPECT_EQ(dv[0], -1.0);
}

TEST(PhaseRhs, AveragedReduction) {
  // alpha = 0.5, T = -Id: R is the zero map and x - R(x) = alpha (x - T(x)).
  auto R = [](const Vector& x) { return Vector::Zero(x.size()).eval(); };
  const SystemSpec spec = SystemSpec::averaged(R, 1, 0.5);
  const auto [dx, dv] = phase_rhs(spec, constant_schedule(2.0, 1.0), 0.0, vec({2.0}), vec({0.0}));
  EXPECT_EQ(dx[0], 0.0);
  EXPECT_NEAR(dv[0], -2.0, 1e-15);
}

TEST(PhaseRhs, NegativeTimeRejected) {
  EXPECT_THROW(
      phase_rhs(oscillator_spec(), constant_schedule(3.0, 1.0), -1.0, vec({1.0}), vec({0.0})),
      ParameterError);
}

TEST(Integrate, OscillatorMatchesClosedForm) {
  const double err = oscillator_max_error(run_oscillator(1e-3));
  EXPECT_LE(err, 1e-8);
}

TEST(Integrate, FrictionOnlyClosedForm) {
  // B = 0, gamma = 2: x(t) = u0 + v0 (1 - e^{-gamma t}) / gamma.
  const SystemSpec spec = SystemSpec::cocoercive(zero_field(1));
  IntegratorConfig cfg;
  cfg.horizon = 20.0;
  const Trajectory traj = integrate(spec, constant_schedule(2.0, 1.0), vec({1.0}), vec({2.0}), cfg);
  double err = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    err = std::max(err, std::abs(traj.x[i][0] - (1.0 + (1.0 - std::exp(-2.0 * t)))));
  }
  EXPECT_LE(err, 1e-10);
  EXPECT_NEAR(traj.x.back()[0], 2.0, 1e-8);
  for (const Vector& f : traj.field) EXPECT_EQ(f.norm(), 0.0);
}

TEST(Integrate, EquilibriumPreserved) {
  // Starting at a zero of the field with zero velocity pins the trajectory.
  const SmoothConvex g = quadratic_objective(
      (Matrix(2, 2) << 2, 1, 1, 2).finished(), vec({1.0, 0.0}));
  const Vector x_star = *g.minimizer;
  IntegratorConfig cfg;
  cfg.horizon = 100.0;
  const Trajectory traj =
      integrate(SystemSpec::gradient(g), constant_schedule(2.0, 1.0), x_star,
                Vector::Zero(2), cfg);
  double deviation = 0.0;
  for (const Vector& x : traj.x) deviation = std::max(deviation, (x - x_star).norm());
  EXPECT_LE(deviation, 1e-10);
}

TEST(Integrate, Rk4OrderFactor) {
  // Halve the step in the truncation-dominated regime: the error should drop
  // by roughly 2^4.
  const double coarse = oscillator_max_error(run_oscillator(0.05));
  const double fine = oscillator_max_error(run_oscillator(0.025));
  const double factor = coarse / fine;
  EXPECT_GE(factor, 12.0);
  EXPECT_LE(factor, 20.0);
}

TEST(Integrate, NonexpansiveReductionConsistency) {
  auto T = [](const Vector& x) { return (-x).eval(); };
  const SystemSpec via_kind = SystemSpec::nonexpansive(T, 2);
  OperatorField manual;
  manual.dim = 2;
  manual.eval = [T](const Vector& x) { return (x - T(x)).eval(); };
  manual.beta = 0.5;
  const SystemSpec via_field = SystemSpec::cocoercive(manual);

  IntegratorConfig cfg;
  cfg.horizon = 10.0;
  const Schedule s = constant_schedule(2.5, 1.0);
  const Trajectory a = integrate(via_kind, s, vec({1.0, -0.5}), vec({0.0, 0.2}), cfg);
  const Trajectory b = integrate(via_field, s, vec({1.0, -0.5}), vec({0.0, 0.2}), cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LE((a.x[i] - b.x[i]).norm(), 1e-12);
    EXPECT_LE((a.v[i] - b.v[i]).norm(), 1e-12);
  }
}

TEST(Integrate, AveragedEqualsScaledNonexpansive) {
  // averaged(R, alpha) with relaxation lambda(t) integrates identically to
  // nonexpansive(T) with relaxation alpha * lambda(t).
  const double alpha = 0.25;
  auto T = [](const Vector& x) {
    Vector out(2);
    out[0] = x[1];
    out[1] = -x[0];
    return out;  // rotation by -pi/2, an isometry
  };
  auto R = [T, alpha](const Vector& x) { return ((1.0 - alpha) * x + alpha * T(x)).eval(); };

  IntegratorConfig cfg;
  cfg.horizon = 10.0;
  const Trajectory a = integrate(SystemSpec::averaged(R, 2, alpha), constant_schedule(2.0, 1.2),
                                 vec({1.0, 1.0}), Vector::Zero(2), cfg);
  const Trajectory b =
      integrate(SystemSpec::nonexpansive(T, 2), constant_schedule(2.0, alpha * 1.2),
                vec({1.0, 1.0}), Vector::Zero(2), cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LE((a.x[i] - b.x[i]).norm(), 1e-12);
    EXPECT_LE((a.v[i] - b.v[i]).norm(), 1e-12);
  }
}

TEST(Integrate, EnergyDissipationConstantRelaxation) {
  // For the gradient system with constant lambda,
  // g(x) + |x'|^2 / (2 lambda) never increases beyond integrator noise.
  const SmoothConvex g = quadratic_objective(
      (Matrix(2, 2) << 2, 1, 1, 2).finished(), Vector::Zero(2));
  const double lambda = 1.0;
  IntegratorConfig cfg;
  cfg.horizon = 30.0;
  const Trajectory traj = integrate(SystemSpec::gradient(g), constant_schedule(2.0, lambda),
                                    vec({1.0, 1.0}), vec({0.5, -0.5}), cfg);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double energy = g.value(traj.x[i]) + 0.5 * traj.v[i].squaredNorm() / lambda;
    EXPECT_LE(energy, previous + 1e-6);
    previous = energy;
  }
}

TEST(Integrate, TrajectoryInvariants) {
  const Trajectory traj = run_oscillator(1e-3, 2.0);
  EXPECT_EQ(traj.times.front(), 0.0);
  EXPECT_EQ(traj.x.front()[0], 1.0);
  EXPECT_EQ(traj.v.front()[0], 0.0);
  const Schedule s = constant_schedule(3.0, 1.0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i > 0) {
      EXPECT_GT(traj.times[i], traj.times[i - 1]);
    }
    // Acceleration rows restate the right-hand side exactly.
    const Vector expected = -s.gamma(traj.times[i]) * traj.v[i] -
                            s.lambda(traj.times[i]) * traj.field[i];
    EXPECT_EQ((traj.a[i] - expected).norm(), 0.0);
  }
}

TEST(Integrate, Rkf45MatchesClosedForm) {
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::rkf45_adaptive;
  cfg.horizon = 20.0;
  const Trajectory traj =
      integrate(oscillator_spec(), constant_schedule(3.0, 1.0), vec({1.0}), vec({0.0}), cfg);
  EXPECT_LE(oscillator_max_error(traj), 1e-6);
  EXPECT_EQ(traj.times.back(), 20.0);
}

TEST(Integrate, Rkf45StepUnderflowIsStiffnessError) {
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::rkf45_adaptive;
  cfg.horizon = 5.0;
  cfg.min_step = 0.5;
  cfg.max_step = 0.5;
  cfg.abs_tol = 1e-14;
  cfg.rel_tol = 1e-14;
  EXPECT_THROW(
      integrate(oscillator_spec(), constant_schedule(3.0, 1.0), vec({1.0}), vec({0.0}), cfg),
      StiffnessError);
}

TEST(Integrate, ConfigValidation) {
  IntegratorConfig cfg;
  cfg.step = 0.1;
  cfg.record_every = 0.01;  // step > record_every
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = IntegratorConfig{};
  cfg.record_every = 100.0;  // beyond horizon
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = IntegratorConfig{};
  cfg.method = IntegratorMethod::rkf45_adaptive;
  cfg.min_step = 1.0;
  cfg.max_step = 0.5;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Integrate, DimensionAndScheduleGuards) {
  IntegratorConfig cfg;
  EXPECT_THROW(
      integrate(oscillator_spec(), constant_schedule(3.0, 1.0), vec({1.0, 2.0}), vec({0.0}), cfg),
      ParameterError);
  const Schedule bad = Schedule::make_custom(
      [](double t) { return 1.0 - t / 30.0; }, [](double) { return 2.0; },
      [](double) { return -1.0 / 30.0; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  EXPECT_THROW(integrate(oscillator_spec(), bad, vec({1.0}), vec({0.0}), cfg),
               InvalidScheduleError);
}

TEST(TerminalResiduals, OscillatorMatchesClosedForm) {
  const Trajectory traj = run_oscillator(1e-3);
  const TerminalResiduals res = terminal_residuals(traj);
  // Slow mode decays like e^{-0.382 t}; at T = 20 the closed form puts the
  // residuals in the 1e-4 range.
  const oracles::LinearOscillator closed(3.0, 1.0, 1.0, 0.0);
  const double x20 = closed.x(20.0);
  const double v20 = closed.dx(20.0);
  EXPECT_NEAR(res.norm_field, std::abs(x20), 1e-10);
  EXPECT_NEAR(res.norm_v, std::abs(v20), 1e-10);
  EXPECT_NEAR(res.norm_a, std::abs(-3.0 * v20 - x20), 1e-10);
  EXPECT_LE(res.norm_v, 1e-3);
  EXPECT_LE(res.norm_a, 1e-3);
  EXPECT_LE(res.norm_field, 1e-3);
}

TEST(TerminalResiduals, StationaryIsZero) {
  const SystemSpec spec = SystemSpec::cocoercive(zero_field(2));
  IntegratorConfig cfg;
  cfg.horizon = 1.0;
  const Trajectory traj =
      integrate(spec, constant_schedule(2.0, 1.0), vec({1.0, 2.0}), Vector::Zero(2), cfg);
  const TerminalResiduals res = terminal_residuals(traj);
  EXPECT_EQ(res.norm_v, 0.0);
  EXPECT_EQ(res.norm_a, 0.0);
  EXPECT_EQ(res.norm_field, 0.0);
}
