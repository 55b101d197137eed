#include "cocoflow/discrete.hpp"

#include <cmath>
#include <string>

namespace cocoflow {

namespace {

constexpr double kDivergenceGuard = 1e8;

void validate_config(const InertialFBConfig& cfg) {
  if (!(cfg.eta > 0.0)) throw ParameterError("InertialFBConfig: eta must be positive");
  if (cfg.max_iter < 1) throw ParameterError("InertialFBConfig: max_iter must be >= 1");
  if (!(cfg.stop_residual > 0.0))
    throw ParameterError("InertialFBConfig: stop_residual must be positive");
  if (!cfg.lambda_seq || !cfg.gamma_seq)
    throw ParameterError("InertialFBConfig: lambda_seq and gamma_seq are required");
}

Vector fb_map(const ProxFunction& f, const SmoothConvex& g, double eta, const Vector& x) {
  return f.prox(eta, x - eta * g.grad(x));
}

}  // namespace

InertialFBConfig InertialFBConfig::constant(double eta, double lambda, double gamma,
                                            int max_iter, double stop_residual) {
  if (!(lambda > 0.0) || !(gamma > 0.0))
    throw ParameterError("InertialFBConfig: lambda and gamma must be positive");
  InertialFBConfig cfg;
  cfg.eta = eta;
  cfg.lambda_seq = [lambda](int) { return lambda; };
  cfg.gamma_seq = [gamma](int) { return gamma; };
  cfg.max_iter = max_iter;
  cfg.stop_residual = stop_residual;
  validate_config(cfg);
  return cfg;
}

InertialFBConfig InertialFBConfig::from_schedule(double eta, const Schedule& s, int max_iter,
                                                 double stop_residual) {
  InertialFBConfig cfg;
  cfg.eta = eta;
  cfg.lambda_seq = [s](int n) { return s.lambda(static_cast<double>(n)); };
  cfg.gamma_seq = [s](int n) { return s.gamma(static_cast<double>(n)); };
  cfg.max_iter = max_iter;
  cfg.stop_residual = stop_residual;
  validate_config(cfg);
  return cfg;
}

const Vector& IterateHistory::last() const {
  if (iterates.empty()) throw PreconditionError("IterateHistory: empty");
  return iterates.back();
}

Vector inertial_fb_step(const ProxFunction& f, const SmoothConvex& g,
                        const InertialFBConfig& cfg, const Vector& x_prev, const Vector& x_cur,
                        int n) {
  if (n < 1) throw ParameterError("inertial_fb_step: n must be >= 1");
  validate_config(cfg);
  require_same_dim(x_prev, x_cur, "inertial_fb_step");
  const double coeff = cfg.lambda_seq(n) / (1.0 + cfg.gamma_seq(n));
  return (1.0 - coeff) * x_cur + coeff * fb_map(f, g, cfg.eta, x_cur) +
         coeff * (x_cur - x_prev);
}

IterateHistory run_inertial_fb(const ProxFunction& f, const SmoothConvex& g,
                               const InertialFBConfig& cfg, const Vector& u0,
                               const Vector& v0) {
  validate_config(cfg);
  require_same_dim(u0, v0, "run_inertial_fb");

  IterateHistory hist;
  auto push = [&](const Vector& x) {
    hist.iterates.push_back(x);
    hist.residuals.push_back((x - fb_map(f, g, cfg.eta, x)).norm());
  };
  push(u0);  // x_0 := u_0
  push(v0);  // x_1 := v_0

  for (int n = 1; n <= cfg.max_iter; ++n) {
    if (hist.residuals.back() <= cfg.stop_residual) {
      hist.converged = true;
      return hist;
    }
    const double coeff = cfg.lambda_seq(n) / (1.0 + cfg.gamma_seq(n));
    if (!(coeff > 0.0) || coeff > 1.0) hist.coefficient_warning = true;
    const Vector& x_cur = hist.iterates[hist.iterates.size() - 1];
    const Vector& x_prev = hist.iterates[hist.iterates.size() - 2];
    Vector next = (1.0 - coeff) * x_cur + coeff * fb_map(f, g, cfg.eta, x_cur) +
                  coeff * (x_cur - x_prev);
    if (next.norm() > kDivergenceGuard) {
      hist.diverged = true;
      push(next);
      return hist;
    }
    push(next);
  }
  hist.converged = hist.residuals.back() <= cfg.stop_residual;
  return hist;
}

DiscreteContinuousComparison compare_discrete_continuous(const IterateHistory& hist,
                                                         const Trajectory& traj,
                                                         double tolerance) {
  if (hist.iterates.empty()) throw PreconditionError("compare_discrete_continuous: empty history");
  if (traj.times.empty()) throw PreconditionError("compare_discrete_continuous: empty trajectory");
  if (hist.last().size() != traj.dim())
    throw ParameterError("compare_discrete_continuous: dimension mismatch");
  DiscreteContinuousComparison cmp;
  cmp.final_gap = (hist.last() - traj.x.back()).norm();
  cmp.same_limit = cmp.final_gap <= tolerance;
  return cmp;
}

}  // namespace cocoflow
