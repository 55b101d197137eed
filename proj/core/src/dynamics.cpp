#include "cocoflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cocoflow {

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::cocoercive: return "cocoercive";
    case SystemKind::nonexpansive: return "nonexpansive";
    case SystemKind::averaged: return "averaged";
    case SystemKind::forward_backward: return "forward_backward";
    case SystemKind::prox_gradient: return "prox_gradient";
    case SystemKind::gradient: return "gradient";
  }
  return "unknown";
}

SystemSpec SystemSpec::cocoercive(OperatorField B) {
  SystemSpec spec;
  spec.kind = SystemKind::cocoercive;
  spec.dim = B.dim;
  spec.reduced = std::move(B);
  return spec;
}

SystemSpec SystemSpec::nonexpansive(VectorMap T, int dim, std::uint64_t check_seed) {
  SystemSpec spec;
  spec.kind = SystemKind::nonexpansive;
  spec.dim = dim;
  spec.reduced = residual_of_nonexpansive(std::move(T), dim, 200, 10.0, check_seed);
  return spec;
}

SystemSpec SystemSpec::averaged(VectorMap R, int dim, double alpha, std::uint64_t check_seed) {
  SystemSpec spec;
  spec.kind = SystemKind::averaged;
  spec.dim = dim;
  spec.alpha = alpha;
  spec.reduced = residual_of_averaged(std::move(R), dim, alpha, 200, 10.0, check_seed);
  return spec;
}

SystemSpec SystemSpec::forward_backward(const MonotoneOperator& A, const OperatorField& B,
                                        double eta) {
  SystemSpec spec;
  spec.kind = SystemKind::forward_backward;
  spec.dim = B.dim;
  spec.eta = eta;
  spec.reduced = fb_residual(A, B, eta);
  return spec;
}

SystemSpec SystemSpec::prox_gradient(const ProxFunction& f, const SmoothConvex& g, double eta) {
  if (f.dim != g.dim) throw ParameterError("prox_gradient: f/g dimension mismatch");
  SystemSpec spec;
  spec.kind = SystemKind::prox_gradient;
  spec.dim = g.dim;
  spec.eta = eta;
  spec.reduced = fb_residual(as_monotone(f), gradient_field(g), eta);
  spec.smooth = g;
  spec.nonsmooth = f;
  return spec;
}

SystemSpec SystemSpec::gradient(const SmoothConvex& g) {
  SystemSpec spec;
  spec.kind = SystemKind::gradient;
  spec.dim = g.dim;
  spec.reduced = gradient_field(g);
  spec.smooth = g;
  return spec;
}

void IntegratorConfig::validate() const {
  if (!(horizon > 0.0)) throw ParameterError("IntegratorConfig: horizon must be positive");
  if (!(record_every > 0.0) || record_every > horizon)
    throw ParameterError("IntegratorConfig: require 0 < record_every <= horizon");
  if (method == IntegratorMethod::rk4_fixed) {
    if (!(step > 0.0) || step > record_every)
      throw ParameterError("IntegratorConfig: require 0 < step <= record_every");
  } else {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw ParameterError("IntegratorConfig: adaptive tolerances must be positive");
    if (!(min_step > 0.0) || min_step > max_step)
      throw ParameterError("IntegratorConfig: require 0 < min_step <= max_step");
  }
}

double Trajectory::final_time() const {
  if (times.empty()) throw PreconditionError("Trajectory: empty");
  return times.back();
}

std::pair<Vector, Vector> phase_rhs(const SystemSpec& spec, const Schedule& s, double t,
                                    const Vector& u, const Vector& v) {
  if (t < 0.0) throw ParameterError("phase_rhs: t must be nonnegative");
  require_same_dim(u, v, "phase_rhs");
  return {v, (-s.gamma(t) * v - s.lambda(t) * spec.reduced(u)).eval()};
}

namespace {

struct PhaseState {
  Vector x, v;
};

// du = v, dv = -gamma(t) v - lambda(t) field(x); field value is reported so
// records can reuse the evaluation.
struct RhsEval {
  Vector dx, dv, field;
};

RhsEval eval_rhs(const SystemSpec& spec, const Schedule& s, double t, const PhaseState& y) {
  RhsEval out;
  out.field = spec.reduced(y.x);
  out.dx = y.v;
  out.dv = -s.gamma(t) * y.v - s.lambda(t) * out.field;
  return out;
}

void record_sample(Trajectory& traj, const SystemSpec& spec, const Schedule& s, double t,
                   const PhaseState& y) {
  const RhsEval rhs = eval_rhs(spec, s, t, y);
  traj.times.push_back(t);
  traj.x.push_back(y.x);
  traj.v.push_back(y.v);
  traj.a.push_back(rhs.dv);
  traj.field.push_back(rhs.field);
}

PhaseState rk4_step(const SystemSpec& spec, const Schedule& s, double t, const PhaseState& y,
                    double h) {
  const RhsEval k1 = eval_rhs(spec, s, t, y);
  const PhaseState y2{y.x + 0.5 * h * k1.dx, y.v + 0.5 * h * k1.dv};
  const RhsEval k2 = eval_rhs(spec, s, t + 0.5 * h, y2);
  const PhaseState y3{y.x + 0.5 * h * k2.dx, y.v + 0.5 * h * k2.dv};
  const RhsEval k3 = eval_rhs(spec, s, t + 0.5 * h, y3);
  const PhaseState y4{y.x + h * k3.dx, y.v + h * k3.dv};
  const RhsEval k4 = eval_rhs(spec, s, t + h, y4);
  return {y.x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
          y.v + (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv)};
}

void integrate_rk4(const SystemSpec& spec, const Schedule& s, const IntegratorConfig& cfg,
                   Trajectory& traj, PhaseState y) {
  const long records = std::lround(cfg.horizon / cfg.record_every);
  double t = 0.0;
  record_sample(traj, spec, s, t, y);
  for (long r = 0; r < records; ++r) {
    const double t_next = (r + 1 == records) ? cfg.horizon : (r + 1) * cfg.record_every;
    const double span = t_next - t;
    const int substeps = std::max(1, static_cast<int>(std::ceil(span / cfg.step - 1e-12)));
    const double h = span / substeps;
    for (int k = 0; k < substeps; ++k) {
      y = rk4_step(spec, s, t + k * h, y, h);
    }
    t = t_next;
    record_sample(traj, spec, s, t, y);
  }
}

// Fehlberg 4(5) pair with standard coefficients; the 5th order solution is
// propagated.
struct Rkf45Result {
  PhaseState y5;
  double error = 0.0;
};

Rkf45Result rkf45_step(const SystemSpec& spec, const Schedule& s, double t, const PhaseState& y,
                       double h) {
  static constexpr double a2 = 1.0 / 4.0;
  static constexpr double b31 = 3.0 / 32.0, b32 = 9.0 / 32.0;
  static constexpr double b41 = 1932.0 / 2197.0, b42 = -7200.0 / 2197.0, b43 = 7296.0 / 2197.0;
  static constexpr double b51 = 439.0 / 216.0, b52 = -8.0, b53 = 3680.0 / 513.0,
                          b54 = -845.0 / 4104.0;
  static constexpr double b61 = -8.0 / 27.0, b62 = 2.0, b63 = -3544.0 / 2565.0,
                          b64 = 1859.0 / 4104.0, b65 = -11.0 / 40.0;
  static constexpr double c41 = 25.0 / 216.0, c43 = 1408.0 / 2565.0, c44 = 2197.0 / 4104.0,
                          c45 = -1.0 / 5.0;
  static constexpr double c51 = 16.0 / 135.0, c53 = 6656.0 / 12825.0, c54 = 28561.0 / 56430.0,
                          c55 = -9.0 / 50.0, c56 = 2.0 / 55.0;

  const RhsEval k1 = eval_rhs(spec, s, t, y);
  const PhaseState s2{y.x + h * a2 * k1.dx, y.v + h * a2 * k1.dv};
  const RhsEval k2 = eval_rhs(spec, s, t + h / 4.0, s2);
  const PhaseState s3{y.x + h * (b31 * k1.dx + b32 * k2.dx), y.v + h * (b31 * k1.dv + b32 * k2.dv)};
  const RhsEval k3 = eval_rhs(spec, s, t + 3.0 * h / 8.0, s3);
  const PhaseState s4{y.x + h * (b41 * k1.dx + b42 * k2.dx + b43 * k3.dx),
                      y.v + h * (b41 * k1.dv + b42 * k2.dv + b43 * k3.dv)};
  const RhsEval k4 = eval_rhs(spec, s, t + 12.0 * h / 13.0, s4);
  const PhaseState s5{y.x + h * (b51 * k1.dx + b52 * k2.dx + b53 * k3.dx + b54 * k4.dx),
                      y.v + h * (b51 * k1.dv + b52 * k2.dv + b53 * k3.dv + b54 * k4.dv)};
  const RhsEval k5 = eval_rhs(spec, s, t + h, s5);
  const PhaseState s6{
      y.x + h * (b61 * k1.dx + b62 * k2.dx + b63 * k3.dx + b64 * k4.dx + b65 * k5.dx),
      y.v + h * (b61 * k1.dv + b62 * k2.dv + b63 * k3.dv + b64 * k4.dv + b65 * k5.dv)};
  const RhsEval k6 = eval_rhs(spec, s, t + h / 2.0, s6);

  Rkf45Result out;
  const Vector x4 = y.x + h * (c41 * k1.dx + c43 * k3.dx + c44 * k4.dx + c45 * k5.dx);
  const Vector v4 = y.v + h * (c41 * k1.dv + c43 * k3.dv + c44 * k4.dv + c45 * k5.dv);
  out.y5.x = y.x + h * (c51 * k1.dx + c53 * k3.dx + c54 * k4.dx + c55 * k5.dx + c56 * k6.dx);
  out.y5.v = y.v + h * (c51 * k1.dv + c53 * k3.dv + c54 * k4.dv + c55 * k5.dv + c56 * k6.dv);
  out.error = std::sqrt((out.y5.x - x4).squaredNorm() + (out.y5.v - v4).squaredNorm());
  return out;
}

void integrate_rkf45(const SystemSpec& spec, const Schedule& s, const IntegratorConfig& cfg,
                     Trajectory& traj, PhaseState y) {
  const long records = std::lround(cfg.horizon / cfg.record_every);
  double t = 0.0;
  double h = std::min(cfg.max_step, cfg.record_every);
  record_sample(traj, spec, s, t, y);
  for (long r = 0; r < records; ++r) {
    const double t_next = (r + 1 == records) ? cfg.horizon : (r + 1) * cfg.record_every;
    while (t < t_next - 1e-14 * cfg.horizon) {
      const double h_try = std::min(h, t_next - t);
      const Rkf45Result step = rkf45_step(spec, s, t, y, h_try);
      const double scale =
          cfg.abs_tol + cfg.rel_tol * std::sqrt(y.x.squaredNorm() + y.v.squaredNorm());
      if (step.error <= scale || h_try <= cfg.min_step) {
        if (step.error > scale && h_try <= cfg.min_step)
          throw StiffnessError("rkf45: step underflow below min_step at t = " +
                               std::to_string(t));
        t += h_try;
        y = step.y5;
      }
      const double ratio = step.error > 0.0 ? scale / step.error : 10.0;
      const double factor = std::clamp(0.9 * std::pow(ratio, 0.2), 0.2, 5.0);
      h = std::clamp(h_try * factor, cfg.min_step, cfg.max_step);
    }
    t = t_next;
    record_sample(traj, spec, s, t, y);
  }
}

}  // namespace

Trajectory integrate(const SystemSpec& spec, const Schedule& s, const Vector& u0,
                     const Vector& v0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (u0.size() != spec.dim || v0.size() != spec.dim)
    throw ParameterError("integrate: initial data dimension mismatch");
  require_finite(u0, "integrate u0");
  require_finite(v0, "integrate v0");
  // Positivity sweep before spending integrator work.
  for (int i = 0; i < 1000; ++i) {
    const double t = cfg.horizon * i / 999.0;
    if (!(s.lambda(t) > 0.0) || !(s.gamma(t) > 0.0))
      throw InvalidScheduleError("integrate: schedule nonpositive at t = " + std::to_string(t));
  }

  Trajectory traj;
  traj.reduced = spec.reduced;
  const std::size_t expected = static_cast<std::size_t>(cfg.horizon / cfg.record_every) + 2;
  traj.times.reserve(expected);
  traj.x.reserve(expected);
  traj.v.reserve(expected);
  traj.a.reserve(expected);
  traj.field.reserve(expected);

  PhaseState y{u0, v0};
  if (cfg.method == IntegratorMethod::rk4_fixed) {
    integrate_rk4(spec, s, cfg, traj, std::move(y));
  } else {
    integrate_rkf45(spec, s, cfg, traj, std::move(y));
  }
  return traj;
}

TerminalResiduals terminal_residuals(const Trajectory& traj) {
  if (traj.times.empty()) throw PreconditionError("terminal_residuals: empty trajectory");
  TerminalResiduals out;
  out.norm_v = traj.v.back().norm();
  out.norm_a = traj.a.back().norm();
  out.norm_field = traj.field.back().norm();
  return out;
}

}  // namespace cocoflow
