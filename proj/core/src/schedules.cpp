#include "cocoflow/schedules.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace cocoflow {

namespace {

// Strictness: the assumptions ask for the existence of theta > 0 (zeta > 0);
// margins at or below this tolerance count as infeasible.
constexpr double kStrictnessTol = 1e-12;
// |dgamma| <= this counts as dgamma <= 0, so constant schedules validate.
constexpr double kSignTol = 1e-12;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace

double Schedule::ddgamma(double t) const {
  if (!ddgamma_)
    throw CapabilityError("Schedule: second damping derivative not available for this family");
  return ddgamma_(t);
}

Schedule Schedule::make_constant(double gamma, double lambda) {
  if (!(gamma > 0.0) || !(lambda > 0.0))
    throw ParameterError("constant_schedule: gamma and lambda must be positive");
  Schedule s;
  s.lambda_ = [lambda](double) { return lambda; };
  s.gamma_ = [gamma](double) { return gamma; };
  s.dlambda_ = [](double) { return 0.0; };
  s.dgamma_ = [](double) { return 0.0; };
  s.ddgamma_ = [](double) { return 0.0; };
  s.family_ = ScheduleFamily::constant;
  ExponentialParams p;
  p.a = 0.0;
  p.rho = 0.0;
  p.b = 1.0 / lambda;
  p.a_prime = 0.0;
  p.rho_prime = 0.0;
  p.b_prime = gamma;
  s.params_ = p;
  return s;
}

Schedule Schedule::make_exponential(const ExponentialParams& p) {
  if (p.a < 0.0 || p.a_prime < 0.0 || p.rho < 0.0 || p.rho_prime < 0.0)
    throw ParameterError("exponential_schedule: a, a', rho, rho' must be nonnegative");
  if (!(p.b > 0.0) || !(p.b_prime > 0.0))
    throw ParameterError("exponential_schedule: b and b' must be positive");
  Schedule s;
  s.lambda_ = [p](double t) { return 1.0 / (p.a * std::exp(-p.rho * t) + p.b); };
  s.dlambda_ = [p](double t) {
    const double denom = p.a * std::exp(-p.rho * t) + p.b;
    return p.a * p.rho * std::exp(-p.rho * t) / (denom * denom);
  };
  s.gamma_ = [p](double t) { return p.a_prime * std::exp(-p.rho_prime * t) + p.b_prime; };
  s.dgamma_ = [p](double t) { return -p.a_prime * p.rho_prime * std::exp(-p.rho_prime * t); };
  s.ddgamma_ = [p](double t) {
    return p.a_prime * p.rho_prime * p.rho_prime * std::exp(-p.rho_prime * t);
  };
  s.family_ = (p.a == 0.0 && p.a_prime == 0.0) ? ScheduleFamily::constant
                                               : ScheduleFamily::exponential;
  s.params_ = p;
  return s;
}

Schedule Schedule::make_custom(ScalarFn lambda, ScalarFn gamma, ScalarFn dlambda,
                               ScalarFn dgamma, ScalarFn ddgamma) {
  if (!lambda || !gamma || !dlambda || !dgamma)
    throw ParameterError("custom schedule: lambda, gamma and first derivatives are required");
  Schedule s;
  s.lambda_ = std::move(lambda);
  s.gamma_ = std::move(gamma);
  s.dlambda_ = std::move(dlambda);
  s.dgamma_ = std::move(dgamma);
  s.ddgamma_ = std::move(ddgamma);
  s.family_ = ScheduleFamily::custom;
  return s;
}

Schedule constant_schedule(double gamma, double lambda) {
  return Schedule::make_constant(gamma, lambda);
}

Schedule exponential_schedule(double a, double rho, double b, double a_prime,
                              double rho_prime, double b_prime) {
  ExponentialParams p;
  p.a = a;
  p.rho = rho;
  p.b = b;
  p.a_prime = a_prime;
  p.rho_prime = rho_prime;
  p.b_prime = b_prime;
  return Schedule::make_exponential(p);
}

std::string to_string(Assumption a) {
  switch (a) {
    case Assumption::A1: return "A1";
    case Assumption::A2: return "A2";
    case Assumption::A3: return "A3";
    case Assumption::A4: return "A4";
    case Assumption::A5: return "A5";
    case Assumption::A6: return "A6";
  }
  return "?";
}

namespace {

struct GridScan {
  ScheduleBounds bounds;
  double margin = kInfinity;
  double witness_t = 0.0;
  bool signs_ok = true;
  double sign_witness_t = 0.0;
};

// Walks the grid once: positivity, bounds, margin minimum, sign conditions.
// margin_fn receives (t, lambda, gamma); sign_fn receives t and reports the
// worst signed constraint value (<= 0 required up to tolerance).
GridScan scan_grid(const Schedule& s, const TimeGrid& grid,
                   const std::function<double(double, double, double)>& margin_fn,
                   const std::function<double(double)>& sign_fn) {
  grid.validate();
  GridScan scan;
  scan.bounds.lambda_min = kInfinity;
  scan.bounds.gamma_min = kInfinity;
  scan.bounds.lambda_max = -kInfinity;
  scan.bounds.gamma_max = -kInfinity;
  double worst_sign = 0.0;
  for (int i = 0; i < grid.points; ++i) {
    const double t = grid.time_at(i);
    const double lambda = s.lambda(t);
    const double gamma = s.gamma(t);
    if (!(lambda > 0.0) || !(gamma > 0.0))
      throw InvalidScheduleError("schedule nonpositive at t = " + std::to_string(t));
    scan.bounds.lambda_min = std::min(scan.bounds.lambda_min, lambda);
    scan.bounds.lambda_max = std::max(scan.bounds.lambda_max, lambda);
    scan.bounds.gamma_min = std::min(scan.bounds.gamma_min, gamma);
    scan.bounds.gamma_max = std::max(scan.bounds.gamma_max, gamma);

    const double margin = margin_fn(t, lambda, gamma);
    if (margin < scan.margin) {
      scan.margin = margin;
      scan.witness_t = t;
    }
    const double sign_violation = sign_fn(t);
    if (sign_violation > kSignTol && sign_violation > worst_sign) {
      scan.signs_ok = false;
      worst_sign = sign_violation;
      scan.sign_witness_t = t;
    }
  }
  return scan;
}

ValidationReport finish_report(Assumption which, GridScan scan,
                               std::optional<double> tail_margin) {
  // For the analytic families the infimum may sit in the tail; fold in the
  // closed-form t -> infinity value.
  if (tail_margin && *tail_margin < scan.margin) {
    scan.margin = *tail_margin;
    scan.witness_t = kInfinity;
  }
  ValidationReport report;
  report.assumption = which;
  report.margin = scan.margin;
  report.bounds = scan.bounds;
  if (!scan.signs_ok) {
    report.feasible = false;
    report.witness_t = scan.sign_witness_t;
  } else {
    report.feasible = scan.margin > kStrictnessTol;
    report.witness_t = scan.witness_t;
  }
  return report;
}

// gamma^2/lambda in the tail of the exponential family: gamma -> b',
// lambda -> 1/b.
std::optional<double> tail_ratio(const Schedule& s) {
  const auto& p = s.exponential_params();
  if (!p) return std::nullopt;
  return p->b_prime * p->b_prime * p->b;
}

double monotone_sign_violation(const Schedule& s, double t) {
  // dgamma <= 0 <= dlambda, both up to tolerance.
  return std::max(s.dgamma(t), -s.dlambda(t));
}

ValidationReport validate_ratio_assumption(Assumption which, const Schedule& s,
                                           const TimeGrid& grid, double delta,
                                           double beta_scale) {
  // Margin of gamma^2/lambda >= 2 (1+theta) / delta, or with beta_scale set,
  // of beta gamma^2 / lambda >= 1 + theta.
  auto margin_fn = [&](double, double lambda, double gamma) {
    if (beta_scale > 0.0) return beta_scale * gamma * gamma / lambda - 1.0;
    return delta * gamma * gamma / (2.0 * lambda) - 1.0;
  };
  auto sign_fn = [&](double t) { return monotone_sign_violation(s, t); };
  GridScan scan = scan_grid(s, grid, margin_fn, sign_fn);
  std::optional<double> tail;
  if (auto ratio = tail_ratio(s)) {
    tail = beta_scale > 0.0 ? beta_scale * *ratio - 1.0 : delta * *ratio / 2.0 - 1.0;
  }
  return finish_report(which, scan, tail);
}

}  // namespace

ValidationReport validate_a1(const Schedule& s, double beta, const TimeGrid& grid) {
  if (!(beta > 0.0)) throw ParameterError("validate_a1: beta must be positive");
  return validate_ratio_assumption(Assumption::A1, s, grid, 0.0, beta);
}

ValidationReport validate_a2(const Schedule& s, const TimeGrid& grid) {
  return validate_ratio_assumption(Assumption::A2, s, grid, 1.0, 0.0);
}

ValidationReport validate_a3(const Schedule& s, double alpha, const TimeGrid& grid) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("validate_a3: alpha must lie in (0,1)");
  return validate_ratio_assumption(Assumption::A3, s, grid, 1.0 / alpha, 0.0);
}

ValidationReport validate_a4(const Schedule& s, double beta, double eta, const TimeGrid& grid) {
  if (!(beta > 0.0)) throw ParameterError("validate_a4: beta must be positive");
  if (!(eta > 0.0) || eta > 2.0 * beta)
    throw ParameterError("validate_a4: eta must lie in (0, 2 beta]");
  const double delta = (4.0 * beta - eta) / (2.0 * beta);
  return validate_ratio_assumption(Assumption::A4, s, grid, delta, 0.0);
}

ValidationReport validate_a5(const Schedule& s, double beta, double eta, const TimeGrid& grid) {
  if (!(beta > 0.0)) throw ParameterError("validate_a5: beta must be positive");
  if (!(eta > 0.0)) throw ParameterError("validate_a5: eta must be positive");
  auto margin_fn = [&](double, double lambda, double gamma) {
    return (gamma * gamma / lambda - eta / beta - 1.0) / eta;
  };
  auto sign_fn = [&](double t) { return monotone_sign_violation(s, t); };
  GridScan scan = scan_grid(s, grid, margin_fn, sign_fn);
  std::optional<double> tail;
  if (auto ratio = tail_ratio(s)) tail = (*ratio - eta / beta - 1.0) / eta;
  return finish_report(Assumption::A5, scan, tail);
}

ValidationReport validate_a6(const Schedule& s, const TimeGrid& grid) {
  if (!s.has_ddgamma())
    throw CapabilityError("validate_a6: schedule does not expose the second damping derivative");
  auto margin_fn = [&](double t, double lambda, double gamma) {
    return gamma * lambda - s.dlambda(t);
  };
  auto sign_fn = [&](double t) {
    const double dgamma = s.dgamma(t);
    return std::max(dgamma, 2.0 * dgamma * s.gamma(t) - s.ddgamma(t));
  };
  GridScan scan = scan_grid(s, grid, margin_fn, sign_fn);
  std::optional<double> tail;
  if (const auto& p = s.exponential_params()) tail = p->b_prime / p->b;
  return finish_report(Assumption::A6, scan, tail);
}

}  // namespace cocoflow
