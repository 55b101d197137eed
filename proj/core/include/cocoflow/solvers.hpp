#pragma once

#include "cocoflow/operators.hpp"
#include "cocoflow/types.hpp"

namespace cocoflow {

/// Minimizer of 1/2 <x,Qx> + <c,x> via Qx = -c; rejects singular Q.
Vector solve_quadratic_minimizer(const Matrix& Q, const Vector& c);

/// High-accuracy proximal-gradient iteration with step eta, run until the
/// forward-backward residual drops below target_residual. Used as the x*
/// oracle for composite problems.
Vector reference_prox_gradient(const ProxFunction& f, const SmoothConvex& g, double eta,
                               Vector x0, double target_residual = 1e-12,
                               long max_iter = 2000000);

}  // namespace cocoflow
