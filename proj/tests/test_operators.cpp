#include "cocoflow/operators.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cocoflow/experiment.hpp"
#include "cocoflow/rng.hpp"
#include "cocoflow/solvers.hpp"
#include "support/oracles.hpp"

using namespace cocoflow;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST(SoftThreshold, ClosedFormCases) {
  EXPECT_NEAR(soft_threshold(1.0, 1.0, vec({3.0}))[0], 2.0, 1e-15);
  EXPECT_NEAR(soft_threshold(1.0, 1.0, vec({-0.5}))[0], 0.0, 1e-15);
  const Vector out = soft_threshold(0.5, 2.0, vec({3.0, -3.0}));
  EXPECT_NEAR(out[0], 2.0, 1e-12);
  EXPECT_NEAR(out[1], -2.0, 1e-12);
}

TEST(SoftThreshold, MatchesBruteForceProx) {
  // Independent route: minimize w|y| + (y-x)^2/(2 eta) on a grid per coordinate.
  const double eta = 0.5, w = 2.0;
  for (double x : {3.0, -3.0, 0.7, -0.9, 0.0, 12.5}) {
    const double expected = oracles::l1_prox_1d(eta, w, x, -20.0, 20.0);
    EXPECT_NEAR(soft_threshold(eta, w, vec({x}))[0], expected, 1e-9) << "x = " << x;
  }
}

TEST(SoftThreshold, ParameterDomain) {
  EXPECT_THROW(soft_threshold(0.0, 1.0, vec({1.0})), ParameterError);
  EXPECT_THROW(soft_threshold(-1.0, 1.0, vec({1.0})), ParameterError);
  EXPECT_THROW(soft_threshold(1.0, -0.1, vec({1.0})), ParameterError);
}

TEST(ProjectBox, ClampCases) {
  EXPECT_NEAR(project_box(vec({0.0}), vec({1.0}), vec({2.0}))[0], 1.0, 0.0);
  EXPECT_NEAR(project_box(vec({0.0}), vec({1.0}), vec({0.5}))[0], 0.5, 0.0);
  const Vector out = project_box(vec({-1.0, 0.0}), vec({1.0, 1.0}), vec({-3.0, 0.2}));
  EXPECT_EQ(out[0], -1.0);
  EXPECT_EQ(out[1], 0.2);
}

TEST(ProjectBox, CrossedBoundsRejected) {
  EXPECT_THROW(project_box(vec({1.0}), vec({0.0}), vec({0.5})), ParameterError);
}

TEST(ProjectBox, ProxOfIndicatorForEveryStep) {
  const ProxFunction box = box_indicator(vec({0.0, -1.0}), vec({1.0, 1.0}));
  const Vector x = vec({2.0, -3.0});
  for (double eta : {0.1, 1.0, 10.0}) {
    const Vector p = box.prox(eta, x);
    EXPECT_EQ(p[0], 1.0);
    EXPECT_EQ(p[1], -1.0);
  }
}

TEST(QuadraticGradientField, IdentityAndDiagonal) {
  const OperatorField id = quadratic_gradient_field(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_NEAR(id.beta, 1.0, 1e-10);
  EXPECT_TRUE(id(vec({3.0, 4.0})).isApprox(vec({3.0, 4.0})));

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 0.5;
  const OperatorField diag = quadratic_gradient_field(D, Vector::Zero(2));
  EXPECT_NEAR(diag.beta, 0.5, 1e-10);
  EXPECT_TRUE(diag(vec({1.0, 1.0})).isApprox(vec({2.0, 0.5})));
}

TEST(QuadraticGradientField, BetaFromCharacteristicPolynomial) {
  const auto [lmin, lmax] = oracles::symmetric_2x2_eigenvalues(2.0, 1.0, 2.0);
  EXPECT_NEAR(lmax, 3.0, 1e-14);
  EXPECT_NEAR(lmin, 1.0, 1e-14);
  const OperatorField field = quadratic_gradient_field(mat2(2, 1, 1, 2), vec({1.0, 0.0}));
  EXPECT_NEAR(field.beta, 1.0 / lmax, 1e-10);
  EXPECT_TRUE(field(vec({1.0, 1.0})).isApprox(vec({4.0, 3.0})));
}

TEST(QuadraticGradientField, RejectsAsymmetryAndIndefiniteness) {
  EXPECT_THROW(quadratic_gradient_field(mat2(2, 1, 0.5, 2), Vector::Zero(2)),
               InvalidOperatorError);
  EXPECT_THROW(quadratic_gradient_field(mat2(1, 0, 0, -1), Vector::Zero(2)),
               InvalidOperatorError);
  EXPECT_THROW(quadratic_gradient_field(mat2(-2, 0, 0, -1), Vector::Zero(2)),
               InvalidOperatorError);
}

TEST(PowerIteration, MatchesOracle) {
  EXPECT_NEAR(power_iteration_lmax(mat2(2, 1, 1, 2)), 3.0, 1e-9);
  EXPECT_NEAR(power_iteration_lmax(Matrix::Identity(3, 3)), 1.0, 1e-9);
  EXPECT_NEAR(power_iteration_lmax(Matrix::Zero(2, 2)), 0.0, 1e-12);
}

TEST(ResidualOfNonexpansive, CatalogCases) {
  const OperatorField zero = residual_of_nonexpansive([](const Vector& x) { return x; }, 2);
  EXPECT_NEAR(zero(vec({1.0, -2.0})).norm(), 0.0, 0.0);

  const OperatorField reflect =
      residual_of_nonexpansive([](const Vector& x) { return (-x).eval(); }, 2);
  EXPECT_EQ(reflect.beta, 0.5);
  EXPECT_TRUE(reflect(vec({1.0, 2.0})).isApprox(vec({2.0, 4.0})));

  const OperatorField proj = residual_of_nonexpansive(
      [](const Vector& x) { return project_box(vec({0.0}), vec({1.0}), x); }, 1);
  EXPECT_NEAR(proj(vec({2.0}))[0], 1.0, 0.0);
}

TEST(ResidualOfNonexpansive, RejectsExpansiveMap) {
  EXPECT_THROW(residual_of_nonexpansive([](const Vector& x) { return (2.0 * x).eval(); }, 2),
               InvalidOperatorError);
}

TEST(AveragedFromNonexpansive, Cases) {
  auto id = [](const Vector& x) { return x; };
  auto neg = [](const Vector& x) { return (-x).eval(); };
  EXPECT_NEAR(averaged_from_nonexpansive(id, 1, 0.5)(vec({7.0}))[0], 7.0, 0.0);
  EXPECT_NEAR(averaged_from_nonexpansive(neg, 1, 0.5)(vec({7.0}))[0], 0.0, 0.0);
  EXPECT_NEAR(averaged_from_nonexpansive(neg, 1, 0.25)(vec({4.0}))[0], 2.0, 1e-15);
  EXPECT_THROW(averaged_from_nonexpansive(neg, 1, 0.0), ParameterError);
  EXPECT_THROW(averaged_from_nonexpansive(neg, 1, 1.0), ParameterError);
}

TEST(AveragedFromNonexpansive, ResidualScalesByAlpha) {
  // x - R(x) = alpha (x - T(x)) pointwise.
  auto T = [](const Vector& x) { return project_box(vec({0.0, 0.0}), vec({1.0, 1.0}), x); };
  const double alpha = 0.3;
  auto R = averaged_from_nonexpansive(T, 2, alpha);
  SampleRng rng(11);
  for (int k = 0; k < 50; ++k) {
    const Vector x = rng.in_ball(2, 5.0);
    const Vector lhs = x - R(x);
    const Vector rhs = alpha * (x - T(x));
    EXPECT_LE((lhs - rhs).norm(), 1e-14);
  }
}

TEST(FbResidual, ZeroOperatorCases) {
  const OperatorField identity = quadratic_gradient_field(Matrix::Identity(2, 2), Vector::Zero(2));
  const OperatorField fb1 = fb_residual(zero_operator(2), identity, 1.0);
  EXPECT_NEAR(fb1.delta, 1.5, 1e-15);
  EXPECT_TRUE(fb1(vec({1.0, -2.0})).isApprox(vec({1.0, -2.0})));

  const OperatorField fb2 = fb_residual(zero_operator(2), identity, 2.0);
  EXPECT_NEAR(fb2.delta, 1.0, 1e-15);
  EXPECT_TRUE(fb2(vec({1.0, -2.0})).isApprox(vec({2.0, -4.0})));
}

TEST(FbResidual, ProxOnlyCase) {
  const OperatorField fb = fb_residual(l1_norm(1, 1.0), zero_field(1), 1.0);
  EXPECT_NEAR(fb(vec({3.0}))[0], 1.0, 1e-15);  // 3 - soft(3) = 3 - 2
}

TEST(FbResidual, ReducesToEtaBWithZeroOperator) {
  const OperatorField B = quadratic_gradient_field(mat2(2, 1, 1, 2), vec({0.3, -0.4}));
  for (double eta : {0.1, 1.0 / 3.0, 0.5}) {
    const OperatorField fb = fb_residual(zero_operator(2), B, eta);
    SampleRng rng(3);
    for (int k = 0; k < 100; ++k) {
      const Vector x = rng.in_ball(2, 10.0);
      const Vector expect = eta * B(x);
      EXPECT_LE((fb(x) - expect).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(FbResidual, ParameterDomain) {
  const OperatorField identity = quadratic_gradient_field(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_THROW(fb_residual(zero_operator(2), identity, 0.0), ParameterError);
  EXPECT_THROW(fb_residual(zero_operator(2), identity, -1.0), ParameterError);
  EXPECT_THROW(fb_residual(zero_operator(3), identity, 1.0), ParameterError);
}

TEST(CheckCocoercivity, EqualityAndInflatedClaim) {
  OperatorField identity = quadratic_gradient_field(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_LE(check_cocoercivity(identity, 1000, 10.0, 42).max_violation, 1e-12);
  identity.beta = 2.0;  // inflated claim: 2|d|^2 > <d, d>
  EXPECT_GT(check_cocoercivity(identity, 1000, 10.0, 42).max_violation, 0.0);
}

TEST(CheckCocoercivity, DiagonalCase) {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 0.5;
  const OperatorField field = quadratic_gradient_field(D, Vector::Zero(2));
  ASSERT_NEAR(field.beta, 0.5, 1e-12);
  EXPECT_LE(check_cocoercivity(field, 10000, 10.0, 42).max_violation, 1e-12);
}

namespace {

std::vector<OperatorField> catalog_fields() {
  std::vector<OperatorField> fields;
  fields.push_back(quadratic_gradient_field(Matrix::Identity(2, 2), Vector::Zero(2)));
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 0.5;
  fields.push_back(quadratic_gradient_field(D, vec({0.5, -1.0})));
  fields.push_back(quadratic_gradient_field(mat2(2, 1, 1, 2), vec({1.0, 0.0})));
  fields.push_back(zero_field(3));

  const double angle = M_PI / 4.0;
  auto rotation = [angle](const Vector& x) {
    Vector out(2);
    out[0] = std::cos(angle) * x[0] - std::sin(angle) * x[1];
    out[1] = std::sin(angle) * x[0] + std::cos(angle) * x[1];
    return out;
  };
  fields.push_back(residual_of_nonexpansive(rotation, 2));
  fields.push_back(residual_of_averaged(averaged_from_nonexpansive(rotation, 2, 0.25), 2, 0.25));

  // Forward-backward residuals in the certified step range.
  const SmoothConvex boxqp = quadratic_objective(mat2(2, 1, 1, 2), vec({-2.0, 0.2}));
  const ProxFunction box = box_indicator(vec({0.0, -1.0}), vec({1.0, 1.0}));
  fields.push_back(fb_residual(box, gradient_field(boxqp), boxqp.beta));
  fields.push_back(fb_residual(box, gradient_field(boxqp), 2.0 * boxqp.beta));

  const LassoFixture fx = make_lasso_fixture();
  const SmoothConvex least_squares = least_squares_objective(fx.M, fx.y);
  const ProxFunction l1 = l1_norm(10, fx.weight);
  fields.push_back(gradient_field(least_squares));
  fields.push_back(fb_residual(l1, gradient_field(least_squares), least_squares.beta));
  fields.push_back(fb_residual(l1, gradient_field(least_squares), 2.0 * least_squares.beta));
  return fields;
}

}  // namespace

TEST(CatalogProperties, CocoercivityAtDeclaredModulus) {
  for (const OperatorField& field : catalog_fields()) {
    const PairCheckReport report = check_cocoercivity(field, 10000, 10.0, 42);
    EXPECT_LE(report.max_violation, 1e-9)
        << to_string(field.kind) << " dim " << field.dim << " beta " << field.beta;
  }
}

TEST(CatalogProperties, ProxMapsFirmlyNonexpansive) {
  const std::vector<ProxFunction> proxes = {l1_norm(3, 0.1),
                                            box_indicator(vec({0.0, -1.0}), vec({1.0, 1.0})),
                                            zero_function(2)};
  for (const ProxFunction& f : proxes) {
    for (double eta : {0.1, 1.0, 10.0}) {
      auto map = [&](const Vector& x) { return f.prox(eta, x); };
      const PairCheckReport report = check_firmly_nonexpansive(map, f.dim, 10000, 10.0, 42);
      EXPECT_LE(report.max_violation, 1e-9) << "dim " << f.dim << " eta " << eta;
    }
  }
}

TEST(CatalogProperties, L1ProxOptimality) {
  // x - prox(eta, x) must be an element of eta * w * subdifferential(|.|_1) at
  // the prox output: |r_i| <= eta w, with equality and matching sign when the
  // output coordinate is nonzero.
  const double w = 0.7;
  const ProxFunction f = l1_norm(4, w);
  SampleRng rng(42);
  for (double eta : {0.1, 1.0, 10.0}) {
    for (int k = 0; k < 200; ++k) {
      const Vector x = rng.in_ball(4, 10.0);
      const Vector p = f.prox(eta, x);
      const Vector r = x - p;
      for (int i = 0; i < 4; ++i) {
        EXPECT_LE(std::abs(r[i]), eta * w + 1e-12);
        if (p[i] != 0.0) {
          EXPECT_NEAR(r[i], eta * w * (p[i] > 0 ? 1.0 : -1.0), 1e-12);
        }
      }
    }
  }
}

TEST(MonotoneOperator, ResolventCharacterizationLinear) {
  // p = J_{eta A}(x)  <=>  (x - p)/eta = Q p for A = Q.
  const Matrix Q = mat2(2, 1, 1, 2);
  const MonotoneOperator A = linear_monotone(Q);
  SampleRng rng(9);
  for (double eta : {0.1, 1.0, 10.0}) {
    for (int k = 0; k < 50; ++k) {
      const Vector x = rng.in_ball(2, 10.0);
      const Vector p = A.resolvent(eta, x);
      EXPECT_LE(((x - p) / eta - Q * p).norm(), 1e-10);
    }
  }
}

TEST(MonotoneOperator, ResolventCharacterizationSubdifferential) {
  // For A = subdifferential of w|.|_1: (x - p)/eta must lie in w sign(p).
  const double w = 0.4;
  const MonotoneOperator A = as_monotone(l1_norm(2, w));
  SampleRng rng(10);
  for (int k = 0; k < 100; ++k) {
    const Vector x = rng.in_ball(2, 5.0);
    const double eta = 0.5;
    const Vector p = A.resolvent(eta, x);
    const Vector u = (x - p) / eta;
    for (int i = 0; i < 2; ++i) {
      EXPECT_LE(std::abs(u[i]), w + 1e-12);
      if (p[i] != 0.0) {
        EXPECT_NEAR(u[i], w * (p[i] > 0 ? 1.0 : -1.0), 1e-12);
      }
    }
  }
}

TEST(MonotoneOperator, ResolventFirmlyNonexpansive) {
  const MonotoneOperator A = linear_monotone(mat2(2, 1, 1, 2));
  auto map = [&](const Vector& x) { return A.resolvent(1.0, x); };
  EXPECT_LE(check_firmly_nonexpansive(map, 2, 2000, 10.0, 42).max_violation, 1e-9);
}

TEST(ZeroSetConsistency, FbResidualVanishesAtOracleSolutions) {
  // Lasso instance: the residual is zero exactly at fixed points of
  // prox o (Id - eta grad).
  const LassoFixture fx = make_lasso_fixture();
  const SmoothConvex g = least_squares_objective(fx.M, fx.y);
  const ProxFunction f = l1_norm(10, fx.weight);
  const Vector x_star = reference_prox_gradient(f, g, g.beta, Vector::Zero(10));
  for (double eta : {g.beta, 2.0 * g.beta}) {
    const OperatorField fb = fb_residual(f, gradient_field(g), eta);
    EXPECT_LE(fb(x_star).norm(), 1e-8);
    const Vector fixed = f.prox(eta, x_star - eta * g.grad(x_star));
    EXPECT_LE((fixed - x_star).norm(), 1e-8);
  }
}

TEST(FbResidual, EnlargedStepFieldKeepsLipschitzReading) {
  // For eta > 2 beta the averagedness certificate is gone; the recorded beta
  // still gives a valid sampled Lipschitz bound |Gx - Gy| <= (1/beta)|x - y|.
  const LassoFixture fx = make_lasso_fixture();
  const SmoothConvex g = least_squares_objective(fx.M, fx.y);
  const ProxFunction f = l1_norm(10, fx.weight);
  const OperatorField fb = fb_residual(f, gradient_field(g), 3.0 * g.beta);
  EXPECT_NEAR(fb.delta, 0.5, 1e-12);
  SampleRng rng(42);
  for (int k = 0; k < 2000; ++k) {
    const Vector x = rng.in_ball(10, 10.0);
    const Vector y = rng.in_ball(10, 10.0);
    EXPECT_LE((fb(x) - fb(y)).norm(), (x - y).norm() / fb.beta + 1e-9);
  }
}

TEST(SmoothConvex, GradientMatchesFiniteDifferences) {
  const SmoothConvex g = quadratic_objective(mat2(2, 1, 1, 2), vec({1.0, 0.0}));
  SampleRng rng(5);
  for (int k = 0; k < 20; ++k) {
    const Vector x = rng.in_ball(2, 5.0);
    const Vector grad = g.grad(x);
    for (int i = 0; i < 2; ++i) {
      auto slice = [&](double t) {
        Vector y = x;
        y[i] = t;
        return g.value(y);
      };
      const double fd = oracles::central_difference(slice, x[i], 1e-5);
      EXPECT_NEAR(grad[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(OperatorField, DimensionChecked) {
  const OperatorField field = zero_field(2);
  EXPECT_THROW(field(vec({1.0, 2.0, 3.0})), ParameterError);
}
