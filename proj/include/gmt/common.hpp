// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gmt {

// Error taxonomy mirrored by CLI exit codes: hypothesis violated (1),
// resolution too coarse to certify (2), invalid input (3).
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Lebesgue volume w_d of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  switch (d) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
    default: throw InputError("unit_ball_volume: unsupported dimension " + std::to_string(d));
  }
}

// Measure of the closed arclength cap B_{S^d}(theta0, delta).
inline double cap_measure(int d, double delta) {
  if (d == 1) return 2.0 * delta;
  if (d == 2) return 2.0 * kPi * (1.0 - std::cos(delta));
  throw InputError("cap_measure: unsupported sphere dimension " + std::to_string(d));
}

}  // namespace gmt
