#pragma once

// Independent numeric oracles for the Gaussian-product and KL code paths:
// a 1-D grid quadrature of the normalized product density, and a Monte-Carlo
// estimate of KL(q || N(0,1)). Both avoid the closed forms under test.

#include <cmath>
#include <utility>
#include <vector>

#include "metarl/encoder.hpp"
#include "metarl/rng.hpp"

namespace testsupport {

struct GridMoments {
  double mean = 0.0;
  double var = 0.0;
};

/// Pointwise-normalized moments of prod_n N(x; mean_n, var_n) on a uniform
/// grid spanning all factor means +/- 8 of the widest factor std.
inline GridMoments grid_product_moments(const std::vector<std::pair<double, double>>& factors,
                                        int points = 10000) {
  double lo = factors[0].first, hi = factors[0].first, smax = 0.0;
  for (const auto& [m, v] : factors) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    smax = std::max(smax, std::sqrt(v));
  }
  lo -= 8.0 * smax;
  hi += 8.0 * smax;
  double dx = (hi - lo) / static_cast<double>(points - 1);

  std::vector<double> logw(static_cast<size_t>(points));
  double logw_max = -1e300;
  for (int j = 0; j < points; ++j) {
    double x = lo + dx * j;
    double lw = 0.0;
    for (const auto& [m, v] : factors) lw += -0.5 * (x - m) * (x - m) / v;
    logw[static_cast<size_t>(j)] = lw;
    logw_max = std::max(logw_max, lw);
  }
  long double wsum = 0.0L, xsum = 0.0L;
  for (int j = 0; j < points; ++j) {
    long double w = std::exp(logw[static_cast<size_t>(j)] - logw_max);
    wsum += w;
    xsum += w * static_cast<long double>(lo + dx * j);
  }
  GridMoments gm;
  gm.mean = static_cast<double>(xsum / wsum);
  long double vsum = 0.0L;
  for (int j = 0; j < points; ++j) {
    long double d = static_cast<long double>(lo + dx * j) - static_cast<long double>(gm.mean);
    vsum += std::exp(logw[static_cast<size_t>(j)] - logw_max) * d * d;
  }
  gm.var = static_cast<double>(vsum / wsum);
  return gm;
}

/// Monte-Carlo KL(q || N(0,I)) via E_q[log q - log p]; returns (estimate, SE).
inline std::pair<double, double> mc_kl(const metarl::PosteriorGaussian& post, int n,
                                       metarl::Rng& rng) {
  double mean = 0.0, m2 = 0.0;
  int d = post.dim();
  for (int s = 1; s <= n; ++s) {
    double x = 0.0;
    for (int i = 0; i < d; ++i) {
      double eps = rng.normal();
      double z = post.mean[static_cast<size_t>(i)] +
                 std::sqrt(post.var[static_cast<size_t>(i)]) * eps;
      double logq = -0.5 * eps * eps - 0.5 * std::log(2.0 * M_PI * post.var[static_cast<size_t>(i)]);
      double logp = -0.5 * z * z - 0.5 * std::log(2.0 * M_PI);
      x += logq - logp;
    }
    double delta = x - mean;
    mean += delta / static_cast<double>(s);
    m2 += delta * (x - mean);
  }
  double se = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  return {mean, se};
}

}  // namespace testsupport
