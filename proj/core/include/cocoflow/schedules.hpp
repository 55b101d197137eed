#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cocoflow/types.hpp"

namespace cocoflow {

enum class ScheduleFamily { constant, exponential, custom };

/// Parameters of the family lambda(t) = 1 / (a e^{-rho t} + b),
/// gamma(t) = a' e^{-rho' t} + b'.
struct ExponentialParams {
  double a = 0.0, rho = 0.0, b = 1.0;
  double a_prime = 0.0, rho_prime = 0.0, b_prime = 1.0;
};

using ScalarFn = std::function<double(double)>;

/// Relaxation/damping pair (lambda(t), gamma(t)) with analytic first (and for
/// gamma second) derivatives.
class Schedule {
 public:
  double lambda(double t) const { return lambda_(t); }
  double gamma(double t) const { return gamma_(t); }
  double dlambda(double t) const { return dlambda_(t); }
  double dgamma(double t) const { return dgamma_(t); }
  double ddgamma(double t) const;
  bool has_ddgamma() const { return static_cast<bool>(ddgamma_); }

  ScheduleFamily family() const { return family_; }
  const std::optional<ExponentialParams>& exponential_params() const { return params_; }

  static Schedule make_constant(double gamma, double lambda);
  static Schedule make_exponential(const ExponentialParams& p);
  static Schedule make_custom(ScalarFn lambda, ScalarFn gamma, ScalarFn dlambda,
                              ScalarFn dgamma, ScalarFn ddgamma = nullptr);

 private:
  Schedule() = default;
  ScalarFn lambda_, gamma_, dlambda_, dgamma_, ddgamma_;
  ScheduleFamily family_ = ScheduleFamily::custom;
  std::optional<ExponentialParams> params_;
};

/// Constant pair; degenerate member of the exponential family.
Schedule constant_schedule(double gamma, double lambda);

/// lambda(t) = 1/(a e^{-rho t} + b), gamma(t) = a' e^{-rho' t} + b' with
/// analytic derivatives. Requires a, a', rho, rho' >= 0 and b, b' > 0.
Schedule exponential_schedule(double a, double rho, double b, double a_prime,
                              double rho_prime, double b_prime);

enum class Assumption { A1, A2, A3, A4, A5, A6 };

std::string to_string(Assumption a);

struct ScheduleBounds {
  double lambda_min = 0.0, lambda_max = 0.0;
  double gamma_min = 0.0, gamma_max = 0.0;
};

/// Outcome of checking one assumption over a grid (plus, for the built-in
/// families, the closed-form t -> infinity limit). margin is the largest
/// admissible theta (zeta for A6); feasible iff margin clears the strictness
/// tolerance and the derivative sign conditions hold everywhere.
struct ValidationReport {
  Assumption assumption = Assumption::A1;
  bool feasible = false;
  double margin = 0.0;
  double witness_t = 0.0;  // argmin of the margin; +inf when the tail limit is binding
  ScheduleBounds bounds;

  double theta_star() const { return margin; }
  double zeta_star() const { return margin; }
};

/// (A1): dgamma <= 0 <= dlambda and beta gamma^2 / lambda >= 1 + theta.
ValidationReport validate_a1(const Schedule& s, double beta, const TimeGrid& grid);

/// (A2): gamma^2 / lambda >= 2 (1 + theta).
ValidationReport validate_a2(const Schedule& s, const TimeGrid& grid);

/// (A3): gamma^2 / lambda >= 2 alpha (1 + theta), alpha in (0,1).
ValidationReport validate_a3(const Schedule& s, double alpha, const TimeGrid& grid);

/// (A4): gamma^2 / lambda >= 2 (1 + theta) / delta with
/// delta = (4 beta - eta) / (2 beta), 0 < eta <= 2 beta.
ValidationReport validate_a4(const Schedule& s, double beta, double eta, const TimeGrid& grid);

/// (A5): gamma^2 / lambda >= eta theta + eta / beta + 1; no cap on eta.
ValidationReport validate_a5(const Schedule& s, double beta, double eta, const TimeGrid& grid);

/// (A6): 0 < zeta <= gamma lambda - dlambda, dgamma <= 0,
/// 2 dgamma gamma - ddgamma <= 0.
ValidationReport validate_a6(const Schedule& s, const TimeGrid& grid);

}  // namespace cocoflow
