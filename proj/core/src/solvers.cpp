#include "cocoflow/solvers.hpp"

#include <string>

namespace cocoflow {

Vector solve_quadratic_minimizer(const Matrix& Q, const Vector& c) {
  if (Q.rows() != Q.cols() || Q.rows() != c.size())
    throw ParameterError("solve_quadratic_minimizer: dimension mismatch");
  Eigen::FullPivLU<Matrix> lu(Q);
  if (!lu.isInvertible())
    throw InvalidOperatorError("solve_quadratic_minimizer: Q is singular, minimizer not unique");
  return lu.solve(-c);
}

Vector reference_prox_gradient(const ProxFunction& f, const SmoothConvex& g, double eta,
                               Vector x0, double target_residual, long max_iter) {
  if (f.dim != g.dim || x0.size() != g.dim)
    throw ParameterError("reference_prox_gradient: dimension mismatch");
  if (!(eta > 0.0)) throw ParameterError("reference_prox_gradient: eta must be positive");
  if (!(target_residual > 0.0))
    throw ParameterError("reference_prox_gradient: target_residual must be positive");
  Vector x = std::move(x0);
  for (long it = 0; it < max_iter; ++it) {
    const Vector next = f.prox(eta, x - eta * g.grad(x));
    const double residual = (x - next).norm();
    x = next;
    if (residual <= target_residual) return x;
  }
  throw PreconditionError("reference_prox_gradient: residual target " +
                          std::to_string(target_residual) + " not reached in " +
                          std::to_string(max_iter) + " iterations");
}

}  // namespace cocoflow
