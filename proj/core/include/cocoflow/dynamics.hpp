#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cocoflow/operators.hpp"
#include "cocoflow/schedules.hpp"
#include "cocoflow/types.hpp"

namespace cocoflow {

enum class SystemKind {
  cocoercive,
  nonexpansive,
  averaged,
  forward_backward,
  prox_gradient,
  gradient,
};

std::string to_string(SystemKind kind);

/// One of the five second-order systems, reduced to the common form
/// x'' + gamma(t) x' + lambda(t) field(x) = 0 with a cocoercive field.
struct SystemSpec {
  SystemKind kind = SystemKind::cocoercive;
  int dim = 0;
  OperatorField reduced;
  std::optional<SmoothConvex> smooth;  // g, for gradient / prox_gradient kinds
  std::optional<ProxFunction> nonsmooth;
  double eta = 0.0;    // forward-backward step
  double alpha = 0.0;  // averagedness parameter

  static SystemSpec cocoercive(OperatorField B);
  /// field = Id - T, beta = 1/2. check_seed drives the sampled
  /// nonexpansiveness spot-check at construction.
  static SystemSpec nonexpansive(VectorMap T, int dim, std::uint64_t check_seed = 1234);
  /// field = Id - R = alpha (Id - T), beta = 1/(2 alpha).
  static SystemSpec averaged(VectorMap R, int dim, double alpha,
                             std::uint64_t check_seed = 1234);
  static SystemSpec forward_backward(const MonotoneOperator& A, const OperatorField& B,
                                     double eta);
  static SystemSpec prox_gradient(const ProxFunction& f, const SmoothConvex& g, double eta);
  static SystemSpec gradient(const SmoothConvex& g);
};

enum class IntegratorMethod { rk4_fixed, rkf45_adaptive };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::rk4_fixed;
  double step = 1e-3;  // rk4_fixed
  double abs_tol = 1e-9, rel_tol = 1e-9;  // rkf45_adaptive
  double min_step = 1e-10, max_step = 1.0;
  double horizon = 50.0;
  double record_every = 0.01;

  void validate() const;
};

/// Time-stamped samples of the trajectory. Accelerations and field values
/// come from evaluating the right-hand side at the sample, never from
/// differencing, so a = -gamma v - lambda field holds exactly at each row.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> x, v, a, field;
  OperatorField reduced;  // the field that was integrated

  int dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
  std::size_t size() const { return times.size(); }
  double final_time() const;
};

/// Right-hand side of the phase-space system: (v, -gamma(t) v - lambda(t) field(u)).
std::pair<Vector, Vector> phase_rhs(const SystemSpec& spec, const Schedule& s, double t,
                                    const Vector& u, const Vector& v);

Trajectory integrate(const SystemSpec& spec, const Schedule& s, const Vector& u0,
                     const Vector& v0, const IntegratorConfig& cfg);

struct TerminalResiduals {
  double norm_v = 0.0;
  double norm_a = 0.0;
  double norm_field = 0.0;
};

/// Euclidean norms of the last recorded velocity, acceleration and field value.
TerminalResiduals terminal_residuals(const Trajectory& traj);

}  // namespace cocoflow
