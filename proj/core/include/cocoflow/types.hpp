#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cocoflow {

/// Points of the state space R^n. All operands of one computation share a
/// fixed dimension and must hold finite coordinates.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A parameter lies outside its admissible domain (eta <= 0, alpha not in
/// (0,1), box bounds crossed, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A constructed operator fails one of its declared properties (asymmetry,
/// negative curvature, sampled nonexpansiveness violation).
class InvalidOperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A schedule takes nonpositive values where it must be positive.
class InvalidScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested capability is not available (custom schedule without a second
/// damping derivative).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition fails at runtime; the message carries the
/// measured quantity.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive step control underflowed min_step; the message names the time.
class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A least-squares fit was requested on data at the numerical floor.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file could not be parsed or lacks a required key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform evaluation grid on [0, horizon], endpoints included.
struct TimeGrid {
  double horizon = 50.0;
  int points = 2000;

  double time_at(int i) const {
    return horizon * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  void validate() const {
    if (!(horizon > 0.0)) throw ParameterError("TimeGrid: horizon must be positive");
    if (points < 1000) throw ParameterError("TimeGrid: at least 1000 points required");
  }
};

inline void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size())
    throw ParameterError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw ParameterError(std::string(what) + ": non-finite coordinates");
}

}  // namespace cocoflow
