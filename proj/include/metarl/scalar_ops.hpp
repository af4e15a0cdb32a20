#pragma once

#include <cmath>

// Scalar kernels shared between the tape ops and the no-grad forward paths,
// so dual-route computations agree bitwise.

namespace metarl {

inline double stable_sigmoid(double x) {
  if (x >= 0.0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double stable_softplus(double x) {
  return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

/// std::tanh saturates to exactly +/-1 in doubles for |x| >~ 19; squashing
/// nudges the value strictly inside (-1, 1).
inline constexpr double kSquashLimit = 1.0 - 1e-12;

inline double squash_tanh(double x) {
  double y = std::tanh(x);
  if (y > kSquashLimit) return kSquashLimit;
  if (y < -kSquashLimit) return -kSquashLimit;
  return y;
}

inline const double kHalfLog2Pi = 0.5 * std::log(2.0 * M_PI);
inline const double kTwoLn2 = 2.0 * std::log(2.0);

}  // namespace metarl
