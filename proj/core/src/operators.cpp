#include "cocoflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "cocoflow/rng.hpp"

namespace cocoflow {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kSampledCheckTol = 1e-9;

void require_dim(const OperatorField& field, const Vector& x) {
  if (x.size() != field.dim)
    throw ParameterError("OperatorField: expected dimension " + std::to_string(field.dim) +
                         ", got " + std::to_string(x.size()));
}

void check_map_nonexpansive(const VectorMap& map, int dim, int samples, double radius,
                            std::uint64_t seed, const char* what) {
  const PairCheckReport report = check_nonexpansive(map, dim, samples, radius, seed);
  if (report.max_violation > kSampledCheckTol)
    throw InvalidOperatorError(std::string(what) + ": sampled nonexpansiveness violated by " +
                               std::to_string(report.max_violation));
}

}  // namespace

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::cocoercive: return "cocoercive";
    case FieldKind::residual_of_nonexpansive: return "residual_of_nonexpansive";
    case FieldKind::residual_of_averaged: return "residual_of_averaged";
    case FieldKind::fb_residual: return "fb_residual";
    case FieldKind::gradient: return "gradient";
  }
  return "unknown";
}

Vector OperatorField::operator()(const Vector& x) const {
  require_dim(*this, x);
  return eval(x);
}

Vector soft_threshold(double eta, double weight, const Vector& x) {
  if (!(eta > 0.0)) throw ParameterError("soft_threshold: eta must be positive");
  if (weight < 0.0) throw ParameterError("soft_threshold: weight must be nonnegative");
  const double threshold = eta * weight;
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double magnitude = std::abs(x[i]) - threshold;
    out[i] = magnitude > 0.0 ? (x[i] > 0.0 ? magnitude : -magnitude) : 0.0;
  }
  return out;
}

Vector project_box(const Vector& lo, const Vector& hi, const Vector& x) {
  require_same_dim(lo, hi, "project_box");
  require_same_dim(lo, x, "project_box");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i])
      throw ParameterError("project_box: lo > hi at coordinate " + std::to_string(i));
  return x.cwiseMax(lo).cwiseMin(hi);
}

ProxFunction l1_norm(int dim, double weight) {
  if (weight < 0.0) throw ParameterError("l1_norm: weight must be nonnegative");
  ProxFunction f;
  f.dim = dim;
  f.value = [weight](const Vector& x) { return weight * x.lpNorm<1>(); };
  f.prox = [weight](double eta, const Vector& x) { return soft_threshold(eta, weight, x); };
  return f;
}

ProxFunction box_indicator(Vector lo, Vector hi) {
  require_same_dim(lo, hi, "box_indicator");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i])
      throw ParameterError("box_indicator: lo > hi at coordinate " + std::to_string(i));
  ProxFunction f;
  f.dim = static_cast<int>(lo.size());
  f.value = [lo, hi](const Vector& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] < lo[i] - 1e-12 || x[i] > hi[i] + 1e-12)
        return std::numeric_limits<double>::infinity();
    return 0.0;
  };
  f.prox = [lo, hi](double, const Vector& x) { return project_box(lo, hi, x); };
  return f;
}

ProxFunction zero_function(int dim) {
  ProxFunction f;
  f.dim = dim;
  f.value = [](const Vector&) { return 0.0; };
  f.prox = [](double, const Vector& x) { return x; };
  return f;
}

double power_iteration_lmax(const Matrix& Q, double rel_tol, int max_iter) {
  const Eigen::Index n = Q.rows();
  Vector v = Vector::Ones(n);
  // Slightly uneven start so eigenvectors orthogonal to (1,...,1) are reachable.
  for (Eigen::Index i = 0; i < n; ++i) v[i] += 1e-3 * static_cast<double>(i + 1);
  v.normalize();

  double eigenvalue = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Vector w = Q * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // nilpotent action on the iterate: zero map
    w /= norm;
    const double next = w.dot(Q * w);
    if (iter > 0 && std::abs(next - eigenvalue) <= rel_tol * std::max(1.0, std::abs(next))) {
      return next;
    }
    eigenvalue = next;
    v = std::move(w);
  }
  return eigenvalue;
}

namespace {

// Symmetry + positive semidefiniteness gate shared by the quadratic catalog.
// Returns lambda_max(Q).
double validate_psd_and_lmax(const Matrix& Q) {
  if (Q.rows() != Q.cols()) throw ParameterError("quadratic: Q must be square");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  const double asymmetry = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > kSymmetryTol * scale)
    throw InvalidOperatorError("quadratic: Q asymmetric by " + std::to_string(asymmetry));

  // Dominant eigenvalue first; a dominant negative one is already a rejection.
  const double mu = power_iteration_lmax(Q);
  if (mu < -kSymmetryTol * scale)
    throw InvalidOperatorError("quadratic: negative eigenvalue " + std::to_string(mu));
  const double lmax = std::max(mu, 0.0);

  // Smallest eigenvalue via the shifted spectrum lmax*I - Q.
  if (lmax > 0.0) {
    const Matrix shifted = Matrix::Identity(Q.rows(), Q.cols()) * lmax - Q;
    const double spread = power_iteration_lmax(shifted);
    const double lmin = lmax - std::max(spread, 0.0);
    if (lmin < -1e-10 * std::max(1.0, lmax))
      throw InvalidOperatorError("quadratic: negative eigenvalue " + std::to_string(lmin));
  }
  return lmax;
}

}  // namespace

SmoothConvex quadratic_objective(const Matrix& Q, const Vector& c) {
  if (Q.rows() != c.size()) throw ParameterError("quadratic_objective: Q/c dimension mismatch");
  const double lmax = validate_psd_and_lmax(Q);
  SmoothConvex g;
  g.dim = static_cast<int>(Q.rows());
  g.value = [Q, c](const Vector& x) { return 0.5 * x.dot(Q * x) + c.dot(x); };
  g.grad = [Q, c](const Vector& x) { return Q * x + c; };
  g.beta = lmax > 0.0 ? 1.0 / lmax : 1.0;
  Eigen::FullPivLU<Matrix> lu(Q);
  if (lu.isInvertible()) g.minimizer = lu.solve(-c);
  return g;
}

SmoothConvex least_squares_objective(const Matrix& M, const Vector& y) {
  if (M.rows() != y.size()) throw ParameterError("least_squares_objective: M/y dimension mismatch");
  const Matrix gram = M.transpose() * M;
  const double lmax = power_iteration_lmax(gram);
  SmoothConvex g;
  g.dim = static_cast<int>(M.cols());
  g.value = [M, y](const Vector& x) { return 0.5 * (M * x - y).squaredNorm(); };
  g.grad = [M, y](const Vector& x) { return M.transpose() * (M * x - y); };
  g.beta = lmax > 0.0 ? 1.0 / lmax : 1.0;
  return g;
}

OperatorField quadratic_gradient_field(const Matrix& Q, const Vector& c) {
  if (Q.rows() != c.size()) throw ParameterError("quadratic_gradient_field: Q/c dimension mismatch");
  const double lmax = validate_psd_and_lmax(Q);
  OperatorField field;
  field.dim = static_cast<int>(Q.rows());
  field.eval = [Q, c](const Vector& x) { return Q * x + c; };
  field.beta = lmax > 0.0 ? 1.0 / lmax : 1.0;
  field.kind = FieldKind::gradient;
  return field;
}

OperatorField gradient_field(const SmoothConvex& g) {
  OperatorField field;
  field.dim = g.dim;
  field.eval = g.grad;
  field.beta = g.beta;
  field.kind = FieldKind::gradient;
  return field;
}

OperatorField zero_field(int dim) {
  OperatorField field;
  field.dim = dim;
  field.eval = [dim](const Vector&) { return Vector::Zero(dim); };
  field.beta = 1.0;  // the zero map is beta-cocoercive for every beta
  field.kind = FieldKind::cocoercive;
  return field;
}

OperatorField residual_of_nonexpansive(VectorMap T, int dim, int check_samples,
                                       double check_radius, std::uint64_t check_seed) {
  check_map_nonexpansive(T, dim, check_samples, check_radius, check_seed,
                         "residual_of_nonexpansive");
  OperatorField field;
  field.dim = dim;
  field.eval = [T = std::move(T)](const Vector& x) { return (x - T(x)).eval(); };
  field.beta = 0.5;
  field.kind = FieldKind::residual_of_nonexpansive;
  return field;
}

OperatorField residual_of_averaged(VectorMap R, int dim, double alpha, int check_samples,
                                   double check_radius, std::uint64_t check_seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("residual_of_averaged: alpha must lie in (0,1)");
  check_map_nonexpansive(R, dim, check_samples, check_radius, check_seed,
                         "residual_of_averaged");
  OperatorField field;
  field.dim = dim;
  field.eval = [R = std::move(R)](const Vector& x) { return (x - R(x)).eval(); };
  field.beta = 1.0 / (2.0 * alpha);
  field.kind = FieldKind::residual_of_averaged;
  field.alpha = alpha;
  return field;
}

VectorMap averaged_from_nonexpansive(VectorMap T, int dim, double alpha, int check_samples,
                                     double check_radius, std::uint64_t check_seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("averaged_from_nonexpansive: alpha must lie in (0,1)");
  check_map_nonexpansive(T, dim, check_samples, check_radius, check_seed,
                         "averaged_from_nonexpansive");
  return [T = std::move(T), alpha](const Vector& x) {
    return ((1.0 - alpha) * x + alpha * T(x)).eval();
  };
}

MonotoneOperator zero_operator(int dim) {
  MonotoneOperator A;
  A.dim = dim;
  A.resolvent = [](double, const Vector& x) { return x; };
  return A;
}

MonotoneOperator as_monotone(const ProxFunction& f) {
  MonotoneOperator A;
  A.dim = f.dim;
  A.resolvent = f.prox;
  A.strong_monotonicity = f.strong_convexity;
  return A;
}

MonotoneOperator linear_monotone(const Matrix& Q) {
  validate_psd_and_lmax(Q);
  MonotoneOperator A;
  A.dim = static_cast<int>(Q.rows());
  A.resolvent = [Q](double eta, const Vector& x) {
    const Matrix shifted = Matrix::Identity(Q.rows(), Q.cols()) + eta * Q;
    return Eigen::LDLT<Matrix>(shifted).solve(x).eval();
  };
  return A;
}

OperatorField fb_residual(const MonotoneOperator& A, const OperatorField& B, double eta) {
  if (!(eta > 0.0)) throw ParameterError("fb_residual: eta must be positive");
  if (A.dim != B.dim) throw ParameterError("fb_residual: A/B dimension mismatch");
  const double beta_b = B.beta;
  OperatorField field;
  field.dim = B.dim;
  field.eval = [A, B, eta](const Vector& x) {
    return (x - A.resolvent(eta, x - eta * B.eval(x))).eval();
  };
  field.kind = FieldKind::fb_residual;
  field.eta = eta;
  field.delta = (4.0 * beta_b - eta) / (2.0 * beta_b);
  // Certified modulus for the averaged regime; Lipschitz-consistent fallback
  // for the enlarged-step regime where averagedness is not guaranteed.
  field.beta = eta <= 2.0 * beta_b ? field.delta / 2.0 : beta_b / eta;
  return field;
}

OperatorField fb_residual(const ProxFunction& f, const OperatorField& B, double eta) {
  return fb_residual(as_monotone(f), B, eta);
}

PairCheckReport check_cocoercivity(const OperatorField& field, int samples, double radius,
                                   std::uint64_t seed) {
  if (samples < 1) throw ParameterError("check_cocoercivity: samples must be >= 1");
  SampleRng rng(seed);
  PairCheckReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Vector x = rng.in_ball(field.dim, radius);
    const Vector y = rng.in_ball(field.dim, radius);
    const Vector dB = field.eval(x) - field.eval(y);
    const double violation = field.beta * dB.squaredNorm() - (x - y).dot(dB);
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_x = x;
      report.worst_y = y;
    }
  }
  return report;
}

PairCheckReport check_firmly_nonexpansive(const VectorMap& map, int dim, int samples,
                                          double radius, std::uint64_t seed) {
  if (samples < 1) throw ParameterError("check_firmly_nonexpansive: samples must be >= 1");
  SampleRng rng(seed);
  PairCheckReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Vector x = rng.in_ball(dim, radius);
    const Vector y = rng.in_ball(dim, radius);
    const Vector dP = map(x) - map(y);
    const double violation = dP.squaredNorm() - (x - y).dot(dP);
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_x = x;
      report.worst_y = y;
    }
  }
  return report;
}

PairCheckReport check_nonexpansive(const VectorMap& map, int dim, int samples, double radius,
                                   std::uint64_t seed) {
  if (samples < 1) throw ParameterError("check_nonexpansive: samples must be >= 1");
  SampleRng rng(seed);
  PairCheckReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Vector x = rng.in_ball(dim, radius);
    const Vector y = rng.in_ball(dim, radius);
    const double violation = (map(x) - map(y)).norm() - (x - y).norm();
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_x = x;
      report.worst_y = y;
    }
  }
  return report;
}

}  // namespace cocoflow
