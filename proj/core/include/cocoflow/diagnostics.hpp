#pragma once

#include <vector>

#include "cocoflow/dynamics.hpp"
#include "cocoflow/operators.hpp"
#include "cocoflow/schedules.hpp"
#include "cocoflow/types.hpp"

namespace cocoflow {

/// Samples of a certificate quantity that the theory says must not increase.
/// max_uptick is the largest positive increment between consecutive samples.
struct LyapunovTrace {
  std::vector<double> times;
  std::vector<double> values;
  double max_uptick = 0.0;
};

/// V(t) = <x - x*, x'> + gamma(t)/2 |x - x*|^2 + beta gamma(t)/lambda(t) |x'|^2,
/// the quantity that decreases along (A1)-admissible trajectories. Requires
/// |field(x*)| <= 1e-8.
LyapunovTrace lyapunov_a1(const Trajectory& traj, const Schedule& s, double beta,
                          const Vector& x_star);

/// The decreasing energy of the enlarged-step regime:
/// d/dt((1/eta) h + q) + gamma ((1/eta) h + q) + (1/eta)(gamma/lambda)|x'|^2
/// with h = |x - x*|^2 / 2 and q = g(x) - g(x*) - <grad g(x*), x - x*>.
/// Requires the forward-backward residual at x* to be <= 1e-8; q(t) >= 0 is
/// asserted at every sample.
LyapunovTrace energy_a5(const Trajectory& traj, const Schedule& s, double eta,
                        const SmoothConvex& g, const Vector& x_star);

/// (1/T) integral of x over [0, T] by the trapezoidal rule on the recorded
/// samples, with linear interpolation at T.
Vector ergodic_average(const Trajectory& traj, double T);

/// The ergodic value bound
/// (1/(2 zeta T)) [ |v0 + gamma(0)(u0 - x*)|^2 + (lambda(0)/beta - dgamma(0)) |u0 - x*|^2 ].
/// zeta must be admissible: 0 < zeta <= zeta_star of the schedule on [0, T].
double rate_bound(const Schedule& s, double beta, double zeta, const Vector& u0,
                  const Vector& v0, const Vector& x_star, double T);

struct RateReport {
  std::vector<double> T_grid;
  std::vector<double> ergodic_gap;  // g(mean x) - g(x*)
  std::vector<double> bound;        // rate_bound at each T
  double slope = 0.0;               // log-log tail slope (default tail fraction 0.5)
  std::vector<std::size_t> sample_index;  // trajectory row behind each T
};

/// Evaluates gap and bound along the trajectory at every max(1, stride)-th
/// sample past t = 0.
RateReport make_rate_report(const Trajectory& traj, const Schedule& s, const SmoothConvex& g,
                            double beta, double zeta, const Vector& x_star, int stride = 10);

/// Least-squares slope of log(gap) against log(T) over the trailing
/// tail_fraction of the grid.
double fit_tail_slope(const RateReport& report, double tail_fraction);

/// Finite-time proxy for "lim |x(t) - x*| exists": mean and spread of
/// |x(t) - x*| over the trailing window.
struct FejerCheck {
  double limit_estimate = 0.0;
  double tail_oscillation = 0.0;
};

FejerCheck fejer_limit_check(const Trajectory& traj, const Vector& x_star, double window);

}  // namespace cocoflow
