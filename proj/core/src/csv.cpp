#include "cocoflow/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace cocoflow {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string()
                                               : cell.substr(first, last - first + 1));
  }
  return cells;
}

double parse_cell(const std::string& cell, const char* what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": malformed numeric cell '" + cell + "'");
  }
}

// Shared reader for "<scalar>,<n vector cells>...,<k trailing scalars>" rows.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& in, const char* what) {
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(std::string(what) + ": empty stream");
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != table.header.size())
      throw ConfigError(std::string(what) + ": row width " + std::to_string(cells.size()) +
                        " does not match header width " + std::to_string(table.header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(parse_cell(cell, what));
    table.rows.push_back(std::move(row));
  }
  return table;
}

int count_prefixed(const std::vector<std::string>& header, const std::string& prefix) {
  int n = 0;
  for (const auto& name : header)
    if (name.rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.dim();
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x_" << i;
  for (int i = 0; i < n; ++i) out << ",v_" << i;
  out << ",a_norm,field_norm\n";
  for (std::size_t r = 0; r < traj.size(); ++r) {
    out << format_double(traj.times[r]);
    for (int i = 0; i < n; ++i) out << ',' << format_double(traj.x[r][i]);
    for (int i = 0; i < n; ++i) out << ',' << format_double(traj.v[r][i]);
    out << ',' << format_double(traj.a[r].norm()) << ',' << format_double(traj.field[r].norm())
        << '\n';
  }
}

TrajectorySamples read_trajectory_csv(std::istream& in) {
  const Table table = read_table(in, "trajectory csv");
  const int n = count_prefixed(table.header, "x_");
  if (n < 1 || table.header.size() != static_cast<std::size_t>(2 * n + 3))
    throw ConfigError("trajectory csv: unexpected header layout");
  TrajectorySamples samples;
  for (const auto& row : table.rows) {
    samples.times.push_back(row[0]);
    Vector x(n), v(n);
    for (int i = 0; i < n; ++i) x[i] = row[1 + i];
    for (int i = 0; i < n; ++i) v[i] = row[1 + n + i];
    samples.x.push_back(std::move(x));
    samples.v.push_back(std::move(v));
    samples.a_norm.push_back(row[1 + 2 * n]);
    samples.field_norm.push_back(row[2 + 2 * n]);
  }
  return samples;
}

void write_diagnostics_csv(std::ostream& out, const RateReport& report,
                           const std::vector<double>& lyapunov,
                           const std::vector<double>& field_norm) {
  const std::size_t n = report.T_grid.size();
  if (lyapunov.size() != n || field_norm.size() != n)
    throw ParameterError("write_diagnostics_csv: column length mismatch");
  out << "T,ergodic_gap,bound,lyapunov,field_norm\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << format_double(report.T_grid[i]) << ',' << format_double(report.ergodic_gap[i]) << ','
        << format_double(report.bound[i]) << ',' << format_double(lyapunov[i]) << ','
        << format_double(field_norm[i]) << '\n';
  }
}

DiagnosticsRows read_diagnostics_csv(std::istream& in) {
  const Table table = read_table(in, "diagnostics csv");
  if (table.header.size() != 5) throw ConfigError("diagnostics csv: expected five columns");
  DiagnosticsRows rows;
  for (const auto& row : table.rows) {
    rows.T.push_back(row[0]);
    rows.ergodic_gap.push_back(row[1]);
    rows.bound.push_back(row[2]);
    rows.lyapunov.push_back(row[3]);
    rows.field_norm.push_back(row[4]);
  }
  return rows;
}

void write_history_csv(std::ostream& out, const IterateHistory& hist) {
  const int n = hist.iterates.empty() ? 0 : static_cast<int>(hist.iterates.front().size());
  out << "n";
  for (int i = 0; i < n; ++i) out << ",x_" << i;
  out << ",residual\n";
  for (std::size_t r = 0; r < hist.iterates.size(); ++r) {
    out << r;
    for (int i = 0; i < n; ++i) out << ',' << format_double(hist.iterates[r][i]);
    out << ',' << format_double(hist.residuals[r]) << '\n';
  }
}

HistoryRows read_history_csv(std::istream& in) {
  const Table table = read_table(in, "history csv");
  const int n = count_prefixed(table.header, "x_");
  if (n < 1 || table.header.size() != static_cast<std::size_t>(n + 2))
    throw ConfigError("history csv: unexpected header layout");
  HistoryRows rows;
  for (const auto& row : table.rows) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = row[1 + i];
    rows.iterates.push_back(std::move(x));
    rows.residuals.push_back(row[n + 1]);
  }
  return rows;
}

}  // namespace cocoflow
