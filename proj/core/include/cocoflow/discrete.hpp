#pragma once

#include <functional>
#include <vector>

#include "cocoflow/operators.hpp"
#include "cocoflow/schedules.hpp"
#include "cocoflow/dynamics.hpp"
#include "cocoflow/types.hpp"

namespace cocoflow {

/// Settings for the explicit-discretization inertial relaxed forward-backward
/// iteration (unit step). lambda_seq / gamma_seq give the per-iteration
/// relaxation and damping.
struct InertialFBConfig {
  double eta = 1.0;
  std::function<double(int)> lambda_seq;
  std::function<double(int)> gamma_seq;
  int max_iter = 5000;
  double stop_residual = 1e-8;

  static InertialFBConfig constant(double eta, double lambda, double gamma, int max_iter,
                                   double stop_residual);
  /// Samples the continuous pair at integer times.
  static InertialFBConfig from_schedule(double eta, const Schedule& s, int max_iter,
                                        double stop_residual);
};

struct IterateHistory {
  std::vector<Vector> iterates;    // x_0, x_1, ...
  std::vector<double> residuals;   // |x_n - prox_{eta f}(x_n - eta grad g(x_n))|
  bool converged = false;
  bool diverged = false;
  /// Set when lambda_n / (1 + gamma_n) leaves (0, 1] for some visited n; the
  /// run continues, the convex-combination reading just no longer applies.
  bool coefficient_warning = false;

  const Vector& last() const;
};

/// x_{n+1} = (1 - k_n) x_n + k_n prox_{eta f}(x_n - eta grad g(x_n)) + k_n (x_n - x_{n-1})
/// with k_n = lambda_n / (1 + gamma_n), n >= 1.
Vector inertial_fb_step(const ProxFunction& f, const SmoothConvex& g,
                        const InertialFBConfig& cfg, const Vector& x_prev,
                        const Vector& x_cur, int n);

/// Iterates from x_0 = u0, x_1 = v0 until the residual drops below
/// stop_residual or max_iter is reached; aborts with a divergence flag when
/// |x_n| exceeds 1e8.
IterateHistory run_inertial_fb(const ProxFunction& f, const SmoothConvex& g,
                               const InertialFBConfig& cfg, const Vector& u0, const Vector& v0);

struct DiscreteContinuousComparison {
  double final_gap = 0.0;
  bool same_limit = false;
};

/// Distance between the last discrete iterate and the trajectory's final
/// point; same_limit iff it is within the tolerance.
DiscreteContinuousComparison compare_discrete_continuous(const IterateHistory& hist,
                                                         const Trajectory& traj,
                                                         double tolerance = 1e-4);

}  // namespace cocoflow
