#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cocoflow/types.hpp"

namespace cocoflow {

/// Deterministic sampler for the probabilistic operator checks. Draws are
/// derived from the raw mt19937_64 stream so that a seed pins the sample set
/// regardless of the standard library's distribution implementations.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; one draw consumes two uniforms.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform over the closed ball of the given radius.
  Vector in_ball(int dim, double radius) {
    Vector direction(dim);
    double norm2 = 0.0;
    do {
      for (int i = 0; i < dim; ++i) direction[i] = normal();
      norm2 = direction.squaredNorm();
    } while (norm2 == 0.0);
    const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(dim));
    return direction * (r / std::sqrt(norm2));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cocoflow
