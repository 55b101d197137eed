#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cocoflow/diagnostics.hpp"
#include "cocoflow/discrete.hpp"
#include "cocoflow/dynamics.hpp"
#include "cocoflow/types.hpp"

namespace cocoflow {

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double value);

/// Header: t,x_0..x_{n-1},v_0..v_{n-1},a_norm,field_norm; one row per sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Trajectory rows as parsed back from disk; accelerations and field values
/// are only available as norms.
struct TrajectorySamples {
  std::vector<double> times;
  std::vector<Vector> x, v;
  std::vector<double> a_norm, field_norm;
};

TrajectorySamples read_trajectory_csv(std::istream& in);

/// Header: T,ergodic_gap,bound,lyapunov,field_norm.
void write_diagnostics_csv(std::ostream& out, const RateReport& report,
                           const std::vector<double>& lyapunov,
                           const std::vector<double>& field_norm);

struct DiagnosticsRows {
  std::vector<double> T, ergodic_gap, bound, lyapunov, field_norm;
};

DiagnosticsRows read_diagnostics_csv(std::istream& in);

/// Header: n,x_0..x_{n-1},residual.
void write_history_csv(std::ostream& out, const IterateHistory& hist);

struct HistoryRows {
  std::vector<Vector> iterates;
  std::vector<double> residuals;
};

HistoryRows read_history_csv(std::istream& in);

}  // namespace cocoflow
