#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cocoflow/config.hpp"
#include "cocoflow/discrete.hpp"
#include "cocoflow/dynamics.hpp"
#include "cocoflow/schedules.hpp"
#include "cocoflow/types.hpp"

namespace cocoflow {

// Process exit codes shared with the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAssumption = 2;   // referenced assumption infeasible
inline constexpr int kExitDiagnostics = 3;  // a contracted diagnostic missed its threshold

enum class ProblemType { quadratic, lasso, box_qp, nonexpansive_demo, averaged_demo };

/// The shipping lasso desk instance: M is rows x cols with seeded
/// uniform(-1,1) entries, y = M x_sparse + 0.01 * noise, weight 0.1.
struct LassoFixture {
  Matrix M;
  Vector y;
  double weight = 0.1;
  Vector x_sparse;
};

LassoFixture make_lasso_fixture(std::uint64_t seed = 5, int rows = 20, int cols = 10,
                                double weight = 0.1);

/// Problem data resolved from the [problem] config section.
struct Problem {
  ProblemType type = ProblemType::quadratic;
  int dim = 0;
  std::optional<SmoothConvex> g;
  std::optional<ProxFunction> f;
  VectorMap demo_map;  // T (nonexpansive_demo) or R (averaged_demo)
  double alpha = 0.5;  // averaged_demo
  std::optional<Vector> x_star_override;
};

Problem build_problem(const ConfigFile& cfg);
Schedule build_schedule(const ConfigFile& cfg);
IntegratorConfig build_integrator(const ConfigFile& cfg);

/// Pass/fail thresholds for the contracted diagnostics; spec defaults,
/// overridable from [thresholds].
struct Thresholds {
  double residual = 1e-5;
  double lyapunov_uptick = 1e-6;
  double rate_excess = 1e-9;
  double slope_max = -0.9;
  double oracle_distance = 1e-4;
  double discrete_distance = 1e-6;
  double compare_tolerance = 1e-4;
};

struct ExperimentOptions {
  std::string output_dir;  // empty: [output] dir, then COCOFLOW_OUT, then "out"
  bool force = false;
  std::uint64_t seed = 42;
};

struct CheckLine {
  std::string name;
  bool pass = true;
  bool contractual = true;
  std::string detail;
};

struct RunSummary {
  int exit_code = kExitOk;
  std::vector<CheckLine> checks;
  std::map<std::string, double> metrics;
  std::string text;

  bool passed() const { return exit_code == kExitOk; }
  double metric(const std::string& name) const;
};

/// simulate: validate the referenced assumption, integrate, run the
/// contracted diagnostics, write trajectory.csv and summary.txt.
RunSummary run_simulate(const ConfigFile& cfg, const ExperimentOptions& opts);

/// validate-schedule: run one validator and report margin/witness.
RunSummary run_validate(const ConfigFile& cfg, const ExperimentOptions& opts,
                        Assumption assumption);

/// rate: gradient-system run, RateReport with bound domination and tail
/// slope, written to diagnostics.csv.
RunSummary run_rate(const ConfigFile& cfg, const ExperimentOptions& opts);

/// discrete: inertial relaxed forward-backward iteration, history.csv.
RunSummary run_discrete(const ConfigFile& cfg, const ExperimentOptions& opts);

/// compare: discrete against continuous limits on the same (f, g, eta).
RunSummary run_compare(const ConfigFile& cfg, const ExperimentOptions& opts);

enum class Subcommand { simulate, validate, rate, discrete_run, compare };

/// Fans independent single-parameter overrides out to a worker pool, one
/// output directory per run. Returns the worst exit code.
int run_sweep(const ConfigFile& base, const ExperimentOptions& opts, Subcommand what,
              const std::string& dotted_key, const std::vector<std::string>& values,
              std::optional<Assumption> assumption = std::nullopt);

}  // namespace cocoflow
