#include "cocoflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cocoflow {

namespace {

constexpr double kZeroTol = 1e-8;

void require_zero_at(const Trajectory& traj, const Vector& x_star, const char* what) {
  if (traj.times.empty()) throw PreconditionError(std::string(what) + ": empty trajectory");
  if (x_star.size() != traj.dim())
    throw ParameterError(std::string(what) + ": x_star dimension mismatch");
  const double residual = traj.reduced(x_star).norm();
  if (residual > kZeroTol)
    throw PreconditionError(std::string(what) + ": x_star is not a zero of the field, |field(x*)| = " +
                            std::to_string(residual));
}

LyapunovTrace finish_trace(std::vector<double> times, std::vector<double> values) {
  LyapunovTrace trace;
  trace.max_uptick = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i)
    trace.max_uptick = std::max(trace.max_uptick, values[i] - values[i - 1]);
  trace.times = std::move(times);
  trace.values = std::move(values);
  return trace;
}

}  // namespace

LyapunovTrace lyapunov_a1(const Trajectory& traj, const Schedule& s, double beta,
                          const Vector& x_star) {
  if (!(beta > 0.0)) throw ParameterError("lyapunov_a1: beta must be positive");
  require_zero_at(traj, x_star, "lyapunov_a1");
  std::vector<double> values;
  values.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const Vector diff = traj.x[i] - x_star;
    const double h = 0.5 * diff.squaredNorm();
    const double hdot = diff.dot(traj.v[i]);  // exact from samples, no differencing
    values.push_back(hdot + s.gamma(t) * h +
                     beta * (s.gamma(t) / s.lambda(t)) * traj.v[i].squaredNorm());
  }
  return finish_trace(traj.times, std::move(values));
}

LyapunovTrace energy_a5(const Trajectory& traj, const Schedule& s, double eta,
                        const SmoothConvex& g, const Vector& x_star) {
  if (!(eta > 0.0)) throw ParameterError("energy_a5: eta must be positive");
  require_zero_at(traj, x_star, "energy_a5");
  const Vector grad_star = g.grad(x_star);
  const double g_star = g.value(x_star);
  std::vector<double> values;
  values.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const Vector diff = traj.x[i] - x_star;
    const double h = 0.5 * diff.squaredNorm();
    const double q = g.value(traj.x[i]) - g_star - grad_star.dot(diff);
    if (q < -1e-12)
      throw PreconditionError("energy_a5: q(t) negative at t = " + std::to_string(t) +
                              " (q = " + std::to_string(q) + "); g is not convex here");
    const double hdot = diff.dot(traj.v[i]);
    const double qdot = traj.v[i].dot(g.grad(traj.x[i]) - grad_star);
    values.push_back(hdot / eta + qdot + s.gamma(t) * (h / eta + q) +
                     (s.gamma(t) / s.lambda(t)) * traj.v[i].squaredNorm() / eta);
  }
  return finish_trace(traj.times, std::move(values));
}

Vector ergodic_average(const Trajectory& traj, double T) {
  if (traj.times.empty()) throw PreconditionError("ergodic_average: empty trajectory");
  if (!(T > 0.0) || T > traj.final_time() + 1e-12)
    throw std::out_of_range("ergodic_average: T outside the recorded range");
  Vector integral = Vector::Zero(traj.dim());
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double t0 = traj.times[i - 1];
    const double t1 = traj.times[i];
    if (T <= t0) break;
    if (T >= t1) {
      integral += 0.5 * (t1 - t0) * (traj.x[i - 1] + traj.x[i]);
    } else {
      // Partial trapezoid: linear interpolation of x at T.
      const double w = (T - t0) / (t1 - t0);
      const Vector x_T = (1.0 - w) * traj.x[i - 1] + w * traj.x[i];
      integral += 0.5 * (T - t0) * (traj.x[i - 1] + x_T);
      break;
    }
  }
  return integral / T;
}

double rate_bound(const Schedule& s, double beta, double zeta, const Vector& u0,
                  const Vector& v0, const Vector& x_star, double T) {
  if (!(beta > 0.0)) throw ParameterError("rate_bound: beta must be positive");
  if (!(T > 0.0)) throw ParameterError("rate_bound: T must be positive");
  require_same_dim(u0, v0, "rate_bound");
  require_same_dim(u0, x_star, "rate_bound");
  if (!(zeta > 0.0)) throw ParameterError("rate_bound: zeta must be positive");
  TimeGrid grid;
  grid.horizon = std::max(T, 1.0);
  const ValidationReport a6 = validate_a6(s, grid);
  if (zeta > a6.zeta_star() + 1e-12)
    throw ParameterError("rate_bound: zeta = " + std::to_string(zeta) +
                         " exceeds zeta_star = " + std::to_string(a6.zeta_star()));
  const Vector shifted = v0 + s.gamma(0.0) * (u0 - x_star);
  const double weighted =
      (s.lambda(0.0) / beta - s.dgamma(0.0)) * (u0 - x_star).squaredNorm();
  return (shifted.squaredNorm() + weighted) / (2.0 * zeta * T);
}

RateReport make_rate_report(const Trajectory& traj, const Schedule& s, const SmoothConvex& g,
                            double beta, double zeta, const Vector& x_star, int stride) {
  if (traj.times.empty()) throw PreconditionError("make_rate_report: empty trajectory");
  if (stride < 1) stride = 1;
  const Vector u0 = traj.x.front();
  const Vector v0 = traj.v.front();
  const double g_star = g.value(x_star);
  RateReport report;
  Vector integral = Vector::Zero(traj.dim());
  for (std::size_t i = 1; i < traj.size(); ++i) {
    integral += 0.5 * (traj.times[i] - traj.times[i - 1]) * (traj.x[i - 1] + traj.x[i]);
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != traj.size()) continue;
    const double T = traj.times[i];
    if (!(T > 0.0)) continue;
    const double gap = g.value(integral / T) - g_star;
    if (gap < -1e-10)
      throw PreconditionError("make_rate_report: negative ergodic gap " + std::to_string(gap));
    report.T_grid.push_back(T);
    report.ergodic_gap.push_back(gap);
    report.bound.push_back(rate_bound(s, beta, zeta, u0, v0, x_star, T));
    report.sample_index.push_back(i);
  }
  report.slope = fit_tail_slope(report, 0.5);
  return report;
}

double fit_tail_slope(const RateReport& report, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw ParameterError("fit_tail_slope: tail_fraction must lie in (0,1)");
  const std::size_t n = report.T_grid.size();
  if (n < 2) throw ParameterError("fit_tail_slope: need at least two grid points");
  std::size_t start = static_cast<std::size_t>(std::floor((1.0 - tail_fraction) * n));
  if (start > n - 2) start = n - 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = start; i < n; ++i) {
    if (!(report.ergodic_gap[i] > 0.0))
      throw DegenerateFitError("fit_tail_slope: nonpositive gap in the tail at T = " +
                               std::to_string(report.T_grid[i]));
    const double lx = std::log(report.T_grid[i]);
    const double ly = std::log(report.ergodic_gap[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) throw DegenerateFitError("fit_tail_slope: degenerate abscissa");
  return (count * sxy - sx * sy) / denom;
}

FejerCheck fejer_limit_check(const Trajectory& traj, const Vector& x_star, double window) {
  if (traj.times.empty()) throw PreconditionError("fejer_limit_check: empty trajectory");
  if (!(window > 0.0)) throw ParameterError("fejer_limit_check: window must be positive");
  if (traj.final_time() < 2.0 * window)
    throw PreconditionError("fejer_limit_check: horizon shorter than twice the window");
  if (x_star.size() != traj.dim())
    throw ParameterError("fejer_limit_check: x_star dimension mismatch");
  const double t_from = traj.final_time() - window;
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t count = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] < t_from) continue;
    const double d = (traj.x[i] - x_star).norm();
    sum += d;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    ++count;
  }
  FejerCheck check;
  check.limit_estimate = sum / static_cast<double>(count);
  check.tail_oscillation = hi - lo;
  return check;
}

}  // namespace cocoflow
