#include "cocoflow/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "cocoflow/csv.hpp"
#include "cocoflow/diagnostics.hpp"
#include "cocoflow/rng.hpp"
#include "cocoflow/solvers.hpp"

namespace cocoflow {

namespace fs = std::filesystem;

double RunSummary::metric(const std::string& name) const {
  const auto it = metrics.find(name);
  if (it == metrics.end()) throw ParameterError("RunSummary: no metric named " + name);
  return it->second;
}

LassoFixture make_lasso_fixture(std::uint64_t seed, int rows, int cols, double weight) {
  if (rows < 1 || cols < 3) throw ParameterError("make_lasso_fixture: need rows >= 1, cols >= 3");
  SampleRng rng(seed);
  LassoFixture fixture;
  fixture.M.resize(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) fixture.M(r, c) = rng.uniform(-1.0, 1.0);
  fixture.x_sparse = Vector::Zero(cols);
  fixture.x_sparse[0] = 1.0;
  fixture.x_sparse[cols / 3] = -2.0;
  fixture.x_sparse[(2 * cols) / 3] = 0.5;
  Vector noise(rows);
  for (int r = 0; r < rows; ++r) noise[r] = rng.uniform(-1.0, 1.0);
  fixture.y = fixture.M * fixture.x_sparse + 0.01 * noise;
  fixture.weight = weight;
  return fixture;
}

namespace {

std::string fmt6(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

// Planar rotation scaled by |scale| <= 1; nonexpansive with fixed point 0,
// and for scale < 1 a contraction, so the demo trajectories settle quickly.
VectorMap rotation_map(double angle, double scale) {
  if (std::abs(scale) > 1.0)
    throw ConfigError("demo map scale must satisfy |scale| <= 1 to stay nonexpansive");
  Matrix R(2, 2);
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  R *= scale;
  return [R](const Vector& x) { return (R * x).eval(); };
}

ProblemType parse_problem_type(const std::string& name) {
  if (name == "quadratic") return ProblemType::quadratic;
  if (name == "lasso") return ProblemType::lasso;
  if (name == "box_qp") return ProblemType::box_qp;
  if (name == "nonexpansive_demo") return ProblemType::nonexpansive_demo;
  if (name == "averaged_demo") return ProblemType::averaged_demo;
  throw ConfigError("unknown problem.type: " + name);
}

SystemKind parse_system_kind(const std::string& name) {
  if (name == "cocoercive") return SystemKind::cocoercive;
  if (name == "nonexpansive") return SystemKind::nonexpansive;
  if (name == "averaged") return SystemKind::averaged;
  if (name == "forward_backward") return SystemKind::forward_backward;
  if (name == "prox_gradient") return SystemKind::prox_gradient;
  if (name == "gradient") return SystemKind::gradient;
  throw ConfigError("unknown system.kind: " + name);
}

std::string default_kind(ProblemType type) {
  switch (type) {
    case ProblemType::quadratic: return "gradient";
    case ProblemType::lasso:
    case ProblemType::box_qp: return "prox_gradient";
    case ProblemType::nonexpansive_demo: return "nonexpansive";
    case ProblemType::averaged_demo: return "averaged";
  }
  return "gradient";
}

}  // namespace

Problem build_problem(const ConfigFile& cfg) {
  Problem problem;
  problem.type = parse_problem_type(cfg.get_string("problem", "type"));
  switch (problem.type) {
    case ProblemType::quadratic: {
      const Matrix Q = cfg.get_matrix("problem", "Q");
      const Vector c = cfg.has("problem", "c") ? cfg.get_vector("problem", "c")
                                               : Vector::Zero(Q.rows()).eval();
      problem.g = quadratic_objective(Q, c);
      problem.dim = problem.g->dim;
      break;
    }
    case ProblemType::box_qp: {
      const Matrix Q = cfg.get_matrix("problem", "Q");
      const Vector c = cfg.has("problem", "c") ? cfg.get_vector("problem", "c")
                                               : Vector::Zero(Q.rows()).eval();
      problem.g = quadratic_objective(Q, c);
      problem.f = box_indicator(cfg.get_vector("problem", "lo"), cfg.get_vector("problem", "hi"));
      problem.dim = problem.g->dim;
      if (problem.f->dim != problem.dim) throw ConfigError("box_qp: box/Q dimension mismatch");
      break;
    }
    case ProblemType::lasso: {
      Matrix M;
      Vector y;
      double weight = cfg.get_number_or("problem", "weight", 0.1);
      if (cfg.has("problem", "M")) {
        M = cfg.get_matrix("problem", "M");
        y = cfg.get_vector("problem", "y");
      } else {
        const auto fixture_seed =
            static_cast<std::uint64_t>(cfg.get_number_or("problem", "seed", 5));
        const LassoFixture fixture = make_lasso_fixture(fixture_seed, 20, 10, weight);
        M = fixture.M;
        y = fixture.y;
      }
      if (M.rows() != y.size()) throw ConfigError("lasso: M/y dimension mismatch");
      problem.g = least_squares_objective(M, y);
      problem.f = l1_norm(static_cast<int>(M.cols()), weight);
      problem.dim = problem.g->dim;
      break;
    }
    case ProblemType::nonexpansive_demo: {
      const double angle = cfg.get_number_or("problem", "angle", M_PI / 4.0);
      const double scale = cfg.get_number_or("problem", "scale", 0.5);
      problem.demo_map = rotation_map(angle, scale);
      problem.dim = 2;
      break;
    }
    case ProblemType::averaged_demo: {
      const double angle = cfg.get_number_or("problem", "angle", M_PI / 4.0);
      const double scale = cfg.get_number_or("problem", "scale", 0.5);
      problem.alpha = cfg.get_number_or("problem", "alpha", 0.5);
      VectorMap T = rotation_map(angle, scale);
      const double alpha = problem.alpha;
      problem.demo_map = [T, alpha](const Vector& x) {
        return ((1.0 - alpha) * x + alpha * T(x)).eval();
      };
      problem.dim = 2;
      break;
    }
  }
  if (cfg.has("problem", "x_star")) {
    problem.x_star_override = cfg.get_vector("problem", "x_star");
    if (problem.x_star_override->size() != problem.dim)
      throw ConfigError("problem.x_star has the wrong dimension");
  }
  return problem;
}

Schedule build_schedule(const ConfigFile& cfg) {
  const std::string family = cfg.get_string_or("schedule", "family", "constant");
  if (family == "constant") {
    return constant_schedule(cfg.get_number("schedule", "gamma"),
                             cfg.get_number("schedule", "lambda"));
  }
  if (family == "exponential") {
    return exponential_schedule(cfg.get_number_or("schedule", "a", 0.0),
                                cfg.get_number_or("schedule", "rho", 0.0),
                                cfg.get_number("schedule", "b"),
                                cfg.get_number_or("schedule", "a_prime", 0.0),
                                cfg.get_number_or("schedule", "rho_prime", 0.0),
                                cfg.get_number("schedule", "b_prime"));
  }
  throw ConfigError("unknown schedule.family: " + family);
}

IntegratorConfig build_integrator(const ConfigFile& cfg) {
  IntegratorConfig ic;
  const std::string method = cfg.get_string_or("integrator", "method", "rk4_fixed");
  if (method == "rk4_fixed") {
    ic.method = IntegratorMethod::rk4_fixed;
  } else if (method == "rkf45_adaptive") {
    ic.method = IntegratorMethod::rkf45_adaptive;
  } else {
    throw ConfigError("unknown integrator.method: " + method);
  }
  ic.step = cfg.get_number_or("integrator", "step", 1e-3);
  ic.horizon = cfg.get_number_or("integrator", "horizon", 50.0);
  ic.record_every = cfg.get_number_or("integrator", "record_every", 0.01);
  ic.abs_tol = cfg.get_number_or("integrator", "abs_tol", 1e-9);
  ic.rel_tol = cfg.get_number_or("integrator", "rel_tol", 1e-9);
  ic.min_step = cfg.get_number_or("integrator", "min_step", 1e-10);
  ic.max_step = cfg.get_number_or("integrator", "max_step", 1.0);
  ic.validate();
  return ic;
}

namespace {

Thresholds build_thresholds(const ConfigFile& cfg) {
  Thresholds th;
  th.residual = cfg.get_number_or("thresholds", "residual", th.residual);
  th.lyapunov_uptick = cfg.get_number_or("thresholds", "lyapunov_uptick", th.lyapunov_uptick);
  th.rate_excess = cfg.get_number_or("thresholds", "rate_excess", th.rate_excess);
  th.slope_max = cfg.get_number_or("thresholds", "slope_max", th.slope_max);
  th.oracle_distance = cfg.get_number_or("thresholds", "oracle_distance", th.oracle_distance);
  th.discrete_distance =
      cfg.get_number_or("thresholds", "discrete_distance", th.discrete_distance);
  th.compare_tolerance =
      cfg.get_number_or("thresholds", "compare_tolerance", th.compare_tolerance);
  return th;
}

/// Everything a runner needs, resolved once from the config.
struct Bundle {
  Bundle(Problem p, Schedule s, IntegratorConfig ic)
      : problem(std::move(p)), schedule(std::move(s)), integrator(ic) {}

  Problem problem;
  Schedule schedule;
  IntegratorConfig integrator;
  SystemSpec system;
  Assumption primary = Assumption::A1;
  double assumption_beta = 1.0;  // operator modulus the validator refers to
  double eta = 0.0;
  Vector u0, v0;
  std::optional<Vector> x_star;
  Thresholds thresholds;
};

Bundle build_bundle(const ConfigFile& cfg, const ExperimentOptions& opts) {
  Bundle bundle{build_problem(cfg), build_schedule(cfg), build_integrator(cfg)};
  Problem& problem = bundle.problem;

  const SystemKind kind =
      parse_system_kind(cfg.get_string_or("system", "kind", default_kind(problem.type)));
  switch (kind) {
    case SystemKind::gradient:
      if (!problem.g) throw ConfigError("system.kind gradient requires a smooth objective");
      bundle.system = SystemSpec::gradient(*problem.g);
      bundle.primary = Assumption::A1;
      bundle.assumption_beta = problem.g->beta;
      break;
    case SystemKind::cocoercive:
      if (!problem.g) throw ConfigError("system.kind cocoercive requires a smooth objective");
      bundle.system = SystemSpec::cocoercive(gradient_field(*problem.g));
      bundle.primary = Assumption::A1;
      bundle.assumption_beta = problem.g->beta;
      break;
    case SystemKind::nonexpansive:
      if (!problem.demo_map) throw ConfigError("system.kind nonexpansive requires a demo map");
      bundle.system = SystemSpec::nonexpansive(problem.demo_map, problem.dim, opts.seed);
      bundle.primary = Assumption::A2;
      break;
    case SystemKind::averaged:
      if (!problem.demo_map) throw ConfigError("system.kind averaged requires a demo map");
      bundle.system =
          SystemSpec::averaged(problem.demo_map, problem.dim, problem.alpha, opts.seed);
      bundle.primary = Assumption::A3;
      break;
    case SystemKind::forward_backward:
    case SystemKind::prox_gradient: {
      if (!problem.g || !problem.f)
        throw ConfigError("forward-backward kinds require both f and g");
      const double beta = problem.g->beta;
      if (cfg.has("system", "eta")) {
        bundle.eta = cfg.get_number("system", "eta");
      } else {
        // eta_scale expresses the step as a multiple of the computed beta.
        bundle.eta = cfg.get_number_or("system", "eta_scale", 1.0) * beta;
      }
      if (!(bundle.eta > 0.0)) throw ConfigError("system.eta must be positive");
      if (kind == SystemKind::forward_backward) {
        if (bundle.eta > 2.0 * beta)
          throw ConfigError("forward_backward requires eta <= 2 beta; use prox_gradient for "
                            "the enlarged-step regime");
        bundle.system =
            SystemSpec::forward_backward(as_monotone(*problem.f), gradient_field(*problem.g),
                                         bundle.eta);
      } else {
        bundle.system = SystemSpec::prox_gradient(*problem.f, *problem.g, bundle.eta);
      }
      bundle.assumption_beta = beta;
      bundle.primary = bundle.eta <= 2.0 * beta ? Assumption::A4 : Assumption::A5;
      break;
    }
  }

  bundle.u0 = cfg.has("initial", "u0") ? cfg.get_vector("initial", "u0")
                                       : Vector::Zero(problem.dim).eval();
  bundle.v0 = cfg.has("initial", "v0") ? cfg.get_vector("initial", "v0")
                                       : Vector::Zero(problem.dim).eval();
  if (bundle.u0.size() != problem.dim || bundle.v0.size() != problem.dim)
    throw ConfigError("initial data dimension mismatch");

  // x* oracle: explicit override, closed form, or the reference solver.
  if (problem.x_star_override) {
    bundle.x_star = problem.x_star_override;
  } else {
    switch (problem.type) {
      case ProblemType::quadratic:
        if (problem.g->minimizer) bundle.x_star = problem.g->minimizer;
        break;
      case ProblemType::lasso:
      case ProblemType::box_qp:
        bundle.x_star = reference_prox_gradient(*problem.f, *problem.g, problem.g->beta,
                                                Vector::Zero(problem.dim));
        break;
      case ProblemType::nonexpansive_demo:
      case ProblemType::averaged_demo:
        bundle.x_star = Vector::Zero(problem.dim);
        break;
    }
  }

  bundle.thresholds = build_thresholds(cfg);
  return bundle;
}

TimeGrid validation_grid(const ConfigFile& cfg, const Bundle& bundle) {
  TimeGrid grid;
  grid.horizon = cfg.get_number_or("validation", "horizon", bundle.integrator.horizon);
  grid.points = static_cast<int>(cfg.get_number_or("validation", "points", 2000));
  return grid;
}

ValidationReport validate_primary(const Bundle& bundle, const TimeGrid& grid) {
  switch (bundle.primary) {
    case Assumption::A1: return validate_a1(bundle.schedule, bundle.assumption_beta, grid);
    case Assumption::A2: return validate_a2(bundle.schedule, grid);
    case Assumption::A3: return validate_a3(bundle.schedule, bundle.problem.alpha, grid);
    case Assumption::A4:
      return validate_a4(bundle.schedule, bundle.assumption_beta, bundle.eta, grid);
    case Assumption::A5:
      return validate_a5(bundle.schedule, bundle.assumption_beta, bundle.eta, grid);
    case Assumption::A6: return validate_a6(bundle.schedule, grid);
  }
  throw ParameterError("validate_primary: unreachable");
}

std::string assumption_inequality(Assumption a) {
  switch (a) {
    case Assumption::A1: return "beta*gamma^2/lambda >= 1+theta";
    case Assumption::A2: return "gamma^2/lambda >= 2(1+theta)";
    case Assumption::A3: return "gamma^2/lambda >= 2*alpha*(1+theta)";
    case Assumption::A4: return "gamma^2/lambda >= 2(1+theta)/delta";
    case Assumption::A5: return "gamma^2/lambda >= eta*theta + eta/beta + 1";
    case Assumption::A6: return "0 < zeta <= gamma*lambda - dlambda";
  }
  return "?";
}

std::string resolve_output_dir(const ConfigFile& cfg, const ExperimentOptions& opts) {
  if (!opts.output_dir.empty()) return opts.output_dir;
  if (const char* env = std::getenv("COCOFLOW_OUT"); env != nullptr && *env != '\0') return env;
  return cfg.get_string_or("output", "dir", "out");
}

struct SummaryBuilder {
  RunSummary summary;
  std::ostringstream text;

  void note(const std::string& line) { text << line << '\n'; }

  void check(const std::string& name, bool pass, const std::string& detail,
             bool contractual = true) {
    summary.checks.push_back({name, pass, contractual, detail});
    text << (pass ? "  [pass] " : (contractual ? "  [FAIL] " : "  [info] ")) << name << ": "
         << detail << '\n';
    if (contractual && !pass && summary.exit_code == kExitOk)
      summary.exit_code = kExitDiagnostics;
  }

  void metric(const std::string& name, double value) { summary.metrics[name] = value; }

  RunSummary finish(const std::string& out_dir) {
    text << "status: " << (summary.exit_code == kExitOk ? "PASS" : "FAIL") << '\n';
    summary.text = text.str();
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      std::ofstream file(fs::path(out_dir) / "summary.txt");
      file << summary.text;
    }
    return std::move(summary);
  }
};

void describe_run(SummaryBuilder& sb, const ConfigFile& cfg, const Bundle& bundle) {
  sb.note("problem: " + cfg.get_string("problem", "type") + " (dim " +
          std::to_string(bundle.problem.dim) + ")");
  std::string system_line = "system: " + to_string(bundle.system.kind);
  if (bundle.eta > 0.0) system_line += ", eta = " + fmt6(bundle.eta);
  sb.note(system_line);
  sb.note("schedule: " + cfg.get_string_or("schedule", "family", "constant") +
          ", gamma(0) = " + fmt6(bundle.schedule.gamma(0.0)) +
          ", lambda(0) = " + fmt6(bundle.schedule.lambda(0.0)));
}

// Reports the primary assumption; returns false (and sets the exit code) when
// the gate fails and --force is off.
bool gate_on_assumption(SummaryBuilder& sb, const ValidationReport& report, bool force) {
  const std::string label = "assumption " + to_string(report.assumption) + " (" +
                            assumption_inequality(report.assumption) + ")";
  const std::string detail =
      (report.feasible ? "feasible, " : "violated, ") +
      std::string(report.assumption == Assumption::A6 ? "zeta_star = " : "theta_star = ") +
      fmt6(report.margin) + ", witness_t = " + fmt6(report.witness_t);
  sb.metric("margin", report.margin);
  sb.metric("witness_t", report.witness_t);
  sb.metric("feasible", report.feasible ? 1.0 : 0.0);
  sb.metric(report.assumption == Assumption::A6 ? "zeta_star" : "theta_star", report.margin);
  if (!report.feasible && !force) {
    sb.check(label, false, detail);
    sb.summary.exit_code = kExitAssumption;
    return false;
  }
  sb.check(label, report.feasible, detail, /*contractual=*/!force);
  if (!report.feasible) sb.note("  (--force: diagnostics below are non-contractual)");
  return true;
}

void write_text_file(const std::string& dir, const std::string& name, const std::string& body) {
  fs::create_directories(dir);
  std::ofstream file(fs::path(dir) / name);
  file << body;
}

void residual_checks(SummaryBuilder& sb, const Trajectory& traj, const Thresholds& th,
                     bool contractual) {
  const TerminalResiduals res = terminal_residuals(traj);
  sb.metric("terminal_v", res.norm_v);
  sb.metric("terminal_a", res.norm_a);
  sb.metric("terminal_field", res.norm_field);
  sb.check("terminal residuals (|v|, |a|, |field|)",
           res.norm_v <= th.residual && res.norm_a <= th.residual &&
               res.norm_field <= th.residual,
           "|v| = " + fmt6(res.norm_v) + ", |a| = " + fmt6(res.norm_a) +
               ", |field| = " + fmt6(res.norm_field) + " (threshold " + fmt6(th.residual) + ")",
           contractual);
}

void certificate_checks(SummaryBuilder& sb, const Bundle& bundle, const Trajectory& traj,
                        bool contractual) {
  if (!bundle.x_star) {
    sb.note("  (no x* oracle available; certificate checks skipped)");
    return;
  }
  const Vector& x_star = *bundle.x_star;
  if (bundle.primary == Assumption::A5) {
    const LyapunovTrace trace =
        energy_a5(traj, bundle.schedule, bundle.eta, *bundle.problem.g, x_star);
    sb.metric("lyapunov_uptick", trace.max_uptick);
    sb.check("enlarged-step energy decrease",
             trace.max_uptick <= bundle.thresholds.lyapunov_uptick,
             "max_uptick = " + fmt6(trace.max_uptick) + " (threshold " +
                 fmt6(bundle.thresholds.lyapunov_uptick) + ")",
             contractual);
  } else {
    const LyapunovTrace trace =
        lyapunov_a1(traj, bundle.schedule, bundle.system.reduced.beta, x_star);
    sb.metric("lyapunov_uptick", trace.max_uptick);
    sb.check("Lyapunov decrease",
             trace.max_uptick <= bundle.thresholds.lyapunov_uptick,
             "max_uptick = " + fmt6(trace.max_uptick) + " (threshold " +
                 fmt6(bundle.thresholds.lyapunov_uptick) + ")",
             contractual);
  }
  const double distance = (traj.x.back() - x_star).norm();
  sb.metric("oracle_distance", distance);
  sb.check("distance to x*", distance <= bundle.thresholds.oracle_distance,
           "|x(T) - x*| = " + fmt6(distance) + " (threshold " +
               fmt6(bundle.thresholds.oracle_distance) + ")",
           contractual);
  const double window = std::min(5.0, traj.final_time() / 4.0);
  const FejerCheck fejer = fejer_limit_check(traj, x_star, window);
  sb.metric("fejer_limit", fejer.limit_estimate);
  sb.metric("fejer_oscillation", fejer.tail_oscillation);
  sb.note("  fejer tail: limit_estimate = " + fmt6(fejer.limit_estimate) +
          ", oscillation = " + fmt6(fejer.tail_oscillation) + " over window " + fmt6(window));
}

}  // namespace

RunSummary run_simulate(const ConfigFile& cfg, const ExperimentOptions& opts) {
  const Bundle bundle = build_bundle(cfg, opts);
  const std::string out_dir = resolve_output_dir(cfg, opts);
  SummaryBuilder sb;
  sb.note("subcommand: simulate");
  describe_run(sb, cfg, bundle);

  const TimeGrid grid = validation_grid(cfg, bundle);
  const ValidationReport primary = validate_primary(bundle, grid);
  if (!gate_on_assumption(sb, primary, opts.force)) return sb.finish(out_dir);
  const bool contractual = primary.feasible;

  // For gradient systems the rate assumption is worth reporting alongside.
  std::optional<ValidationReport> a6;
  if (bundle.system.kind == SystemKind::gradient && bundle.schedule.has_ddgamma()) {
    a6 = validate_a6(bundle.schedule, grid);
    sb.metric("zeta_star", a6->margin);
    sb.note("  A6: " + std::string(a6->feasible ? "feasible" : "infeasible") +
            ", zeta_star = " + fmt6(a6->margin));
  }

  const Trajectory traj =
      integrate(bundle.system, bundle.schedule, bundle.u0, bundle.v0, bundle.integrator);
  {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text_file(out_dir, "trajectory.csv", csv.str());
  }
  residual_checks(sb, traj, bundle.thresholds, contractual);
  certificate_checks(sb, bundle, traj, contractual);
  // The five-column diagnostic report is defined whenever the ergodic value
  // machinery applies: a gradient run with an A6-admissible schedule.
  if (a6 && a6->feasible && bundle.x_star) {
    const RateReport report = make_rate_report(traj, bundle.schedule, *bundle.problem.g,
                                               bundle.assumption_beta, a6->margin,
                                               *bundle.x_star, 10);
    const LyapunovTrace lyap =
        lyapunov_a1(traj, bundle.schedule, bundle.system.reduced.beta, *bundle.x_star);
    std::vector<double> lyap_col, field_col;
    for (const std::size_t idx : report.sample_index) {
      lyap_col.push_back(lyap.values[idx]);
      field_col.push_back(traj.field[idx].norm());
    }
    std::ostringstream csv;
    write_diagnostics_csv(csv, report, lyap_col, field_col);
    write_text_file(out_dir, "diagnostics.csv", csv.str());
  }
  return sb.finish(out_dir);
}

RunSummary run_validate(const ConfigFile& cfg, const ExperimentOptions& opts,
                        Assumption assumption) {
  Bundle bundle = build_bundle(cfg, opts);
  bundle.primary = assumption;
  if (assumption == Assumption::A4 || assumption == Assumption::A5) {
    if (!(bundle.eta > 0.0))
      bundle.eta = cfg.get_number_or("system", "eta", bundle.assumption_beta);
  }
  const std::string out_dir = resolve_output_dir(cfg, opts);
  SummaryBuilder sb;
  sb.note("subcommand: validate-schedule");
  describe_run(sb, cfg, bundle);
  const TimeGrid grid = validation_grid(cfg, bundle);
  const ValidationReport report = validate_primary(bundle, grid);
  gate_on_assumption(sb, report, /*force=*/false);
  sb.note("bounds: lambda in [" + fmt6(report.bounds.lambda_min) + ", " +
          fmt6(report.bounds.lambda_max) + "], gamma in [" + fmt6(report.bounds.gamma_min) +
          ", " + fmt6(report.bounds.gamma_max) + "]");
  return sb.finish(out_dir);
}

RunSummary run_rate(const ConfigFile& cfg, const ExperimentOptions& opts) {
  const Bundle bundle = build_bundle(cfg, opts);
  if (bundle.system.kind != SystemKind::gradient)
    throw ConfigError("rate requires system.kind = gradient");
  if (!bundle.x_star)
    throw ConfigError("rate requires an x* oracle (invertible Q or problem.x_star)");
  const std::string out_dir = resolve_output_dir(cfg, opts);
  SummaryBuilder sb;
  sb.note("subcommand: rate");
  describe_run(sb, cfg, bundle);

  const TimeGrid grid = validation_grid(cfg, bundle);
  const ValidationReport a6 = validate_a6(bundle.schedule, grid);
  if (!gate_on_assumption(sb, a6, opts.force)) return sb.finish(out_dir);
  const bool contractual = a6.feasible;

  const double zeta = cfg.get_number_or("rate", "zeta", a6.margin);
  const int stride = static_cast<int>(cfg.get_number_or("rate", "stride", 10));
  const double tail_fraction = cfg.get_number_or("rate", "tail_fraction", 0.5);
  sb.note("zeta = " + fmt6(zeta) + " (zeta_star = " + fmt6(a6.margin) + ")");

  const Trajectory traj =
      integrate(bundle.system, bundle.schedule, bundle.u0, bundle.v0, bundle.integrator);
  const SmoothConvex& g = *bundle.problem.g;
  RateReport report = make_rate_report(traj, bundle.schedule, g, bundle.assumption_beta, zeta,
                                       *bundle.x_star, stride);
  report.slope = fit_tail_slope(report, tail_fraction);

  const LyapunovTrace lyap =
      lyapunov_a1(traj, bundle.schedule, bundle.system.reduced.beta, *bundle.x_star);
  std::vector<double> lyap_col, field_col;
  for (const std::size_t idx : report.sample_index) {
    lyap_col.push_back(lyap.values[idx]);
    field_col.push_back(traj.field[idx].norm());
  }
  {
    std::ostringstream csv;
    write_diagnostics_csv(csv, report, lyap_col, field_col);
    write_text_file(out_dir, "diagnostics.csv", csv.str());
    std::ostringstream traj_csv;
    write_trajectory_csv(traj_csv, traj);
    write_text_file(out_dir, "trajectory.csv", traj_csv.str());
  }

  double max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < report.T_grid.size(); ++i)
    max_excess = std::max(max_excess, report.ergodic_gap[i] - report.bound[i]);
  sb.metric("rate_max_excess", max_excess);
  sb.metric("slope", report.slope);
  sb.check("ergodic bound domination (gap <= bound)",
           max_excess <= bundle.thresholds.rate_excess,
           "max(gap - bound) = " + fmt6(max_excess) + " (allowance " +
               fmt6(bundle.thresholds.rate_excess) + ")",
           contractual);
  sb.check("ergodic tail slope", report.slope <= bundle.thresholds.slope_max,
           "slope = " + fmt6(report.slope) + " (threshold " +
               fmt6(bundle.thresholds.slope_max) + ")",
           contractual);
  residual_checks(sb, traj, bundle.thresholds, contractual);
  certificate_checks(sb, bundle, traj, contractual);
  return sb.finish(out_dir);
}

namespace {

InertialFBConfig build_discrete_config(const ConfigFile& cfg, const Bundle& bundle) {
  const double default_eta =
      bundle.eta > 0.0 ? bundle.eta
                       : (bundle.problem.g ? bundle.problem.g->beta : 1.0);
  const double eta = cfg.get_number_or("discrete", "eta", default_eta);
  const int max_iter = static_cast<int>(cfg.get_number_or("discrete", "max_iter", 5000));
  const double stop_residual = cfg.get_number_or("discrete", "stop_residual", 1e-8);
  if (cfg.get_boolean_or("discrete", "use_schedule", false))
    return InertialFBConfig::from_schedule(eta, bundle.schedule, max_iter, stop_residual);
  return InertialFBConfig::constant(eta, cfg.get_number_or("discrete", "lambda_n", 1.0),
                                    cfg.get_number_or("discrete", "gamma_n", 2.0), max_iter,
                                    stop_residual);
}

struct DiscreteOutcome {
  IterateHistory history;
  InertialFBConfig config;
};

DiscreteOutcome run_discrete_core(SummaryBuilder& sb, const ConfigFile& cfg,
                                  const Bundle& bundle, const std::string& out_dir) {
  if (!bundle.problem.g)
    throw ConfigError("discrete requires an optimization problem (quadratic, lasso, box_qp)");
  const ProxFunction f =
      bundle.problem.f ? *bundle.problem.f : zero_function(bundle.problem.dim);
  DiscreteOutcome outcome{IterateHistory{}, build_discrete_config(cfg, bundle)};
  outcome.history =
      run_inertial_fb(f, *bundle.problem.g, outcome.config, bundle.u0, bundle.v0);
  {
    std::ostringstream csv;
    write_history_csv(csv, outcome.history);
    write_text_file(out_dir, "history.csv", csv.str());
  }
  const IterateHistory& hist = outcome.history;
  sb.metric("discrete_iterations", static_cast<double>(hist.iterates.size()));
  sb.metric("discrete_final_residual", hist.residuals.back());
  if (hist.coefficient_warning)
    sb.note("  warning: lambda_n/(1+gamma_n) left (0,1]; convex-combination reading lost");
  sb.check("discrete divergence guard", !hist.diverged,
           hist.diverged ? "|x_n| exceeded 1e8" : "bounded iterates");
  sb.check("discrete residual target", hist.converged,
           "final residual = " + fmt6(hist.residuals.back()) + " after " +
               std::to_string(hist.iterates.size()) + " iterates (target " +
               fmt6(outcome.config.stop_residual) + ")");
  if (bundle.x_star) {
    const double distance = (hist.last() - *bundle.x_star).norm();
    sb.metric("discrete_oracle_distance", distance);
    sb.check("discrete distance to x*", distance <= bundle.thresholds.discrete_distance,
             "|x_N - x*| = " + fmt6(distance) + " (threshold " +
                 fmt6(bundle.thresholds.discrete_distance) + ")");
  }
  return outcome;
}

}  // namespace

RunSummary run_discrete(const ConfigFile& cfg, const ExperimentOptions& opts) {
  const Bundle bundle = build_bundle(cfg, opts);
  const std::string out_dir = resolve_output_dir(cfg, opts);
  SummaryBuilder sb;
  sb.note("subcommand: discrete");
  describe_run(sb, cfg, bundle);
  run_discrete_core(sb, cfg, bundle, out_dir);
  return sb.finish(out_dir);
}

RunSummary run_compare(const ConfigFile& cfg, const ExperimentOptions& opts) {
  const Bundle bundle = build_bundle(cfg, opts);
  const std::string out_dir = resolve_output_dir(cfg, opts);
  SummaryBuilder sb;
  sb.note("subcommand: compare");
  describe_run(sb, cfg, bundle);

  const TimeGrid grid = validation_grid(cfg, bundle);
  const ValidationReport primary = validate_primary(bundle, grid);
  if (!gate_on_assumption(sb, primary, opts.force)) return sb.finish(out_dir);

  const Trajectory traj =
      integrate(bundle.system, bundle.schedule, bundle.u0, bundle.v0, bundle.integrator);
  {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text_file(out_dir, "trajectory.csv", csv.str());
  }
  const DiscreteOutcome outcome = run_discrete_core(sb, cfg, bundle, out_dir);

  const DiscreteContinuousComparison cmp = compare_discrete_continuous(
      outcome.history, traj, bundle.thresholds.compare_tolerance);
  sb.metric("compare_final_gap", cmp.final_gap);
  sb.metric("same_limit", cmp.same_limit ? 1.0 : 0.0);
  sb.check("discrete and continuous limits agree", cmp.same_limit,
           "final_gap = " + fmt6(cmp.final_gap) + " (tolerance " +
               fmt6(bundle.thresholds.compare_tolerance) + ")");
  return sb.finish(out_dir);
}

int run_sweep(const ConfigFile& base, const ExperimentOptions& opts, Subcommand what,
              const std::string& dotted_key, const std::vector<std::string>& values,
              std::optional<Assumption> assumption) {
  if (values.empty()) throw ParameterError("run_sweep: no values given");
  const std::string base_dir = resolve_output_dir(base, opts);
  std::atomic<std::size_t> cursor{0};
  std::atomic<int> worst{kExitOk};

  auto worker = [&]() {
    while (true) {
      const std::size_t index = cursor.fetch_add(1);
      if (index >= values.size()) return;
      ConfigFile cfg = base;
      ExperimentOptions run_opts = opts;
      run_opts.output_dir =
          base_dir + "/sweep_" + std::to_string(index);
      int code = kExitOk;
      try {
        cfg.set_override(dotted_key, values[index]);
        RunSummary summary;
        switch (what) {
          case Subcommand::simulate: summary = run_simulate(cfg, run_opts); break;
          case Subcommand::validate:
            summary = run_validate(cfg, run_opts, assumption.value_or(Assumption::A1));
            break;
          case Subcommand::rate: summary = run_rate(cfg, run_opts); break;
          case Subcommand::discrete_run: summary = run_discrete(cfg, run_opts); break;
          case Subcommand::compare: summary = run_compare(cfg, run_opts); break;
        }
        code = summary.exit_code;
      } catch (const std::exception& err) {
        write_text_file(run_opts.output_dir, "summary.txt",
                        std::string("error: ") + err.what() + "\nstatus: FAIL\n");
        code = kExitUsage;
      }
      int seen = worst.load();
      while (code > seen && !worst.compare_exchange_weak(seen, code)) {
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), values.size());
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return worst.load();
}

}  // namespace cocoflow
