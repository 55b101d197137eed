#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "cocoflow/types.hpp"

namespace cocoflow {

using VectorMap = std::function<Vector(const Vector&)>;

enum class FieldKind {
  cocoercive,
  residual_of_nonexpansive,
  residual_of_averaged,
  fb_residual,
  gradient,
};

std::string to_string(FieldKind kind);

/// Single-valued map B with a declared cocoercivity modulus beta:
/// beta * |Bx - By|^2 <= <x - y, Bx - By>, which implies (1/beta)-Lipschitz.
/// The modulus is certified by construction for every catalog field except
/// fb_residual with eta > 2*beta_B, where only the Lipschitz reading holds
/// (the enlarged-step runs never rely on it).
struct OperatorField {
  int dim = 0;
  VectorMap eval;
  double beta = 1.0;
  FieldKind kind = FieldKind::cocoercive;
  double alpha = 0.0;  // residual_of_averaged
  double eta = 0.0;    // fb_residual step
  double delta = 0.0;  // fb_residual: (4*beta_B - eta) / (2*beta_B)

  Vector operator()(const Vector& x) const;
};

/// Convex function accessed through its value and proximal map; prox(eta, x)
/// minimizes value(y) + |y - x|^2 / (2 eta).
struct ProxFunction {
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(double, const Vector&)> prox;
  double strong_convexity = 0.0;
};

/// Differentiable convex function whose gradient is (1/beta)-Lipschitz, hence
/// beta-cocoercive (Baillon-Haddad).
struct SmoothConvex {
  int dim = 0;
  std::function<double(const Vector&)> value;
  VectorMap grad;
  double beta = 1.0;
  std::optional<Vector> minimizer;
};

/// Maximally monotone operator accessed through its resolvent
/// J_{eta A} = (Id + eta A)^{-1}.
struct MonotoneOperator {
  int dim = 0;
  std::function<Vector(double, const Vector&)> resolvent;
  double strong_monotonicity = 0.0;
};

/// Componentwise sign(x_i) * max(|x_i| - eta*w, 0); the prox of eta * w|.|_1.
Vector soft_threshold(double eta, double weight, const Vector& x);

/// Componentwise clamp onto [lo, hi]; the prox of the box indicator for
/// every step size.
Vector project_box(const Vector& lo, const Vector& hi, const Vector& x);

ProxFunction l1_norm(int dim, double weight);
ProxFunction box_indicator(Vector lo, Vector hi);
ProxFunction zero_function(int dim);

/// g(x) = 1/2 <x, Qx> + <c, x> with Q symmetric PSD. beta = 1/lambda_max(Q)
/// by power iteration; a minimizer is attached when Q is invertible.
SmoothConvex quadratic_objective(const Matrix& Q, const Vector& c);

/// g(x) = 1/2 |Mx - y|^2; beta = 1/lambda_max(M^T M).
SmoothConvex least_squares_objective(const Matrix& M, const Vector& y);

/// The field x -> Qx + c of the quadratic objective. Rejects asymmetric or
/// indefinite Q.
OperatorField quadratic_gradient_field(const Matrix& Q, const Vector& c);

/// Wraps grad g as a field with the objective's modulus.
OperatorField gradient_field(const SmoothConvex& g);

OperatorField zero_field(int dim);

/// x -> x - T(x) for nonexpansive T; 1/2-cocoercive. The nonexpansiveness
/// claim is spot-checked on sampled pairs at construction.
OperatorField residual_of_nonexpansive(VectorMap T, int dim,
                                       int check_samples = 200,
                                       double check_radius = 10.0,
                                       std::uint64_t check_seed = 1234);

/// x -> x - R(x) for alpha-averaged R; 1/(2 alpha)-cocoercive.
OperatorField residual_of_averaged(VectorMap R, int dim, double alpha,
                                   int check_samples = 200,
                                   double check_radius = 10.0,
                                   std::uint64_t check_seed = 1234);

/// R = (1 - alpha) Id + alpha T. The induced residual x - R(x) equals
/// alpha (x - T(x)).
VectorMap averaged_from_nonexpansive(VectorMap T, int dim, double alpha,
                                     int check_samples = 200,
                                     double check_radius = 10.0,
                                     std::uint64_t check_seed = 1234);

MonotoneOperator zero_operator(int dim);

/// Subdifferential of a prox-capable function; resolvent = prox.
MonotoneOperator as_monotone(const ProxFunction& f);

/// A = Q (monotone linear map, Q PSD); resolvent solves (I + eta Q) p = x.
MonotoneOperator linear_monotone(const Matrix& Q);

/// Forward-backward residual x -> x - J_{eta A}(x - eta B(x)).
/// Records delta = (4 beta - eta) / (2 beta); for eta <= 2 beta the field is
/// delta/2-cocoercive, beyond that only (eta/beta)-Lipschitz is claimed.
OperatorField fb_residual(const MonotoneOperator& A, const OperatorField& B, double eta);
OperatorField fb_residual(const ProxFunction& f, const OperatorField& B, double eta);

/// Largest eigenvalue of symmetric Q by power iteration.
double power_iteration_lmax(const Matrix& Q, double rel_tol = 1e-10, int max_iter = 100000);

/// Worst sampled violation of an operator inequality; positive = violated.
struct PairCheckReport {
  double max_violation = 0.0;
  Vector worst_x, worst_y;
};

/// max over sampled pairs of beta |Bx - By|^2 - <x - y, Bx - By>.
PairCheckReport check_cocoercivity(const OperatorField& field, int samples,
                                   double radius, std::uint64_t seed);

/// max over sampled pairs of |Px - Py|^2 - <x - y, Px - Py>.
PairCheckReport check_firmly_nonexpansive(const VectorMap& map, int dim, int samples,
                                          double radius, std::uint64_t seed);

/// max over sampled pairs of |Tx - Ty| - |x - y|.
PairCheckReport check_nonexpansive(const VectorMap& map, int dim, int samples,
                                   double radius, std::uint64_t seed);

}  // namespace cocoflow
