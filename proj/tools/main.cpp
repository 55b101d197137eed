// Experiment runner for second-order dynamics driven by cocoercive operators:
// simulate trajectories, validate relaxation/damping schedules, certify
// convergence diagnostics, and run the inertial forward-backward iteration.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cocoflow/experiment.hpp"

namespace {

using cocoflow::Assumption;
using cocoflow::ConfigFile;
using cocoflow::ExperimentOptions;
using cocoflow::RunSummary;
using cocoflow::Subcommand;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  bool force = false;
  std::uint64_t seed = 42;
  std::string sweep;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory (overrides config and COCOFLOW_OUT)");
  cmd->add_flag("--force", args.force,
                "run even when the referenced assumption is infeasible; diagnostics become "
                "non-contractual");
  cmd->add_option("--seed", args.seed, "seed for sampled operator checks and fixtures");
  cmd->add_option("--sweep", args.sweep,
                  "fan out one parameter, e.g. --sweep schedule.gamma=1.5,2,2.5 or "
                  "--sweep system.eta=0.1:0.5:5");
  cmd->add_option("--set", args.overrides,
                  "override a config value, e.g. --set schedule.lambda=2")
      ->take_all();
}

std::optional<Assumption> parse_assumption(const std::string& name) {
  if (name == "a1") return Assumption::A1;
  if (name == "a2") return Assumption::A2;
  if (name == "a3") return Assumption::A3;
  if (name == "a4") return Assumption::A4;
  if (name == "a5") return Assumption::A5;
  if (name == "a6") return Assumption::A6;
  return std::nullopt;
}

// "key=v1,v2,v3" or "key=start:step:count" (count evenly spaced values).
struct SweepSpec {
  std::string key;
  std::vector<std::string> values;
};

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw CLI::ValidationError("--sweep expects key=values");
  SweepSpec spec;
  spec.key = text.substr(0, eq);
  const std::string rhs = text.substr(eq + 1);
  if (rhs.find(':') != std::string::npos) {
    double start = 0.0, step = 0.0;
    int count = 0;
    if (std::sscanf(rhs.c_str(), "%lf:%lf:%d", &start, &step, &count) != 3 || count < 1)
      throw CLI::ValidationError("--sweep range must be start:step:count");
    for (int i = 0; i < count; ++i) spec.values.push_back(std::to_string(start + i * step));
  } else {
    std::size_t pos = 0;
    while (pos <= rhs.size()) {
      const auto comma = rhs.find(',', pos);
      const std::string item =
          rhs.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (!item.empty()) spec.values.push_back(item);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (spec.values.empty()) throw CLI::ValidationError("--sweep produced no values");
  return spec;
}

int dispatch(Subcommand what, const CommonArgs& args, std::optional<Assumption> assumption) {
  ConfigFile cfg = ConfigFile::parse_file(args.config_path);
  for (const auto& override_text : args.overrides) {
    const auto eq = override_text.find('=');
    if (eq == std::string::npos) throw cocoflow::ConfigError("--set expects key=value");
    cfg.set_override(override_text.substr(0, eq), override_text.substr(eq + 1));
  }
  ExperimentOptions opts;
  opts.output_dir = args.out_dir;
  opts.force = args.force;
  opts.seed = args.seed;

  if (!args.sweep.empty()) {
    const SweepSpec spec = parse_sweep(args.sweep);
    return cocoflow::run_sweep(cfg, opts, what, spec.key, spec.values, assumption);
  }

  RunSummary summary;
  switch (what) {
    case Subcommand::simulate: summary = cocoflow::run_simulate(cfg, opts); break;
    case Subcommand::validate:
      summary = cocoflow::run_validate(cfg, opts, assumption.value());
      break;
    case Subcommand::rate: summary = cocoflow::run_rate(cfg, opts); break;
    case Subcommand::discrete_run: summary = cocoflow::run_discrete(cfg, opts); break;
    case Subcommand::compare: summary = cocoflow::run_compare(cfg, opts); break;
  }
  std::cout << summary.text;
  return summary.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"second-order cocoercive-operator dynamics toolkit"};
  app.require_subcommand(1);

  CommonArgs simulate_args, validate_args, rate_args, discrete_args, compare_args;
  std::string assumption_name;

  CLI::App* simulate = app.add_subcommand("simulate", "integrate a system and run diagnostics");
  add_common(simulate, simulate_args);

  CLI::App* validate =
      app.add_subcommand("validate-schedule", "check one assumption for a schedule");
  add_common(validate, validate_args);
  validate->add_option("--assumption", assumption_name, "one of a1..a6")->required();

  CLI::App* rate = app.add_subcommand("rate", "gradient run with the ergodic value bound");
  add_common(rate, rate_args);

  CLI::App* discrete =
      app.add_subcommand("discrete", "inertial relaxed forward-backward iteration");
  add_common(discrete, discrete_args);

  CLI::App* compare = app.add_subcommand("compare", "discrete iteration vs continuous trajectory");
  add_common(compare, compare_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return dispatch(Subcommand::simulate, simulate_args, std::nullopt);
    if (validate->parsed()) {
      const auto assumption = parse_assumption(assumption_name);
      if (!assumption) {
        std::cerr << "unknown assumption '" << assumption_name << "' (expected a1..a6)\n";
        return cocoflow::kExitUsage;
      }
      return dispatch(Subcommand::validate, validate_args, assumption);
    }
    if (rate->parsed()) return dispatch(Subcommand::rate, rate_args, std::nullopt);
    if (discrete->parsed()) return dispatch(Subcommand::discrete_run, discrete_args, std::nullopt);
    if (compare->parsed()) return dispatch(Subcommand::compare, compare_args, std::nullopt);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return cocoflow::kExitUsage;
  }
  return cocoflow::kExitUsage;
}
