#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "gnblab/random.hpp"

namespace gnblab::testutil {

struct Mean {
  double value = 0.0;
  double std_error = 0.0;
};

/// Sample mean of f over n draws with its standard error.
inline Mean mc_mean(std::int64_t n, const std::function<double(RandomState&)>& f,
                    RandomState& rng) {
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = f(rng);
    sum += v;
    sum_sq += v * v;
  }
  const double m = sum / n;
  const double var = (sum_sq - n * m * m) / (n - 1);
  return {m, std::sqrt(std::max(var, 0.0) / n)};
}

/// Fraction of draws at or below x.
inline double empirical_cdf(const std::vector<double>& v, double x) {
  std::int64_t hits = 0;
  for (double d : v) hits += d <= x;
  return static_cast<double>(hits) / v.size();
}

inline std::vector<double> draws(std::int64_t n, const std::function<double(RandomState&)>& f,
                                 RandomState& rng) {
  std::vector<double> out(n);
  for (auto& v : out) v = f(rng);
  return out;
}

}  // namespace gnblab::testutil
