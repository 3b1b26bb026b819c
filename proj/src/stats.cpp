#include "gnblab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "gnblab/errors.hpp"
#include "gnblab/special.hpp"

namespace gnblab {

namespace {

constexpr double min_expected = 5.0;

struct Cell {
  double observed_a = 0.0;
  double observed_b = 0.0;
  double expected = 0.0;
};

}  // namespace

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // Jacobi theta form of the distribution function; converges fast here.
    const double q = pi * pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * q);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kolmogorov_isf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("kolmogorov_isf: p must lie in (0, 1)");
  double lo = 0.0, hi = 20.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    (kolmogorov_sf(mid) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double chi2_isf(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("chi2_isf: p must lie in (0, 1)");
  if (!(df > 0.0)) throw DomainError("chi2_isf: df must be positive");
  return 2.0 * gamma_q_inverse(0.5 * df, p);
}

double ks_critical(double level, double n_eff) {
  if (!(n_eff > 0.0)) throw DomainError("ks_critical: effective size must be positive");
  return kolmogorov_isf(level) / std::sqrt(n_eff);
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double n_eff = na * nb / (na + nb);
  return {d, kolmogorov_sf(std::sqrt(n_eff) * d), n_eff};
}

TestResult ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw DomainError("ks_one_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return {d, kolmogorov_sf(std::sqrt(n) * d), n};
}

TestResult chi2_discrete(std::span<const std::int64_t> samples, const PmfTable& pmf) {
  if (samples.empty()) throw DomainError("chi2_discrete: empty sample");
  const std::size_t tail = pmf.probs.size();
  std::vector<double> counts(tail + 1, 0.0);
  for (auto s : samples) {
    if (s < 0) throw DomainError("chi2_discrete: negative count in sample");
    const auto k = static_cast<std::size_t>(s);
    counts[std::min(k, tail)] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  std::vector<Cell> cells;
  Cell run;
  for (std::size_t k = 0; k <= tail; ++k) {
    run.observed_a += counts[k];
    run.expected += n * (k < tail ? pmf.probs[k] : pmf.tail_mass);
    if (run.expected >= min_expected) {
      cells.push_back(run);
      run = {};
    }
  }
  if (!cells.empty()) {
    cells.back().observed_a += run.observed_a;
    cells.back().expected += run.expected;
  }
  if (cells.size() < 2) {
    throw DegenerateDataError("chi2_discrete: fewer than two cells with expected count >= 5");
  }
  double stat = 0.0;
  for (const auto& c : cells) {
    const double diff = c.observed_a - c.expected;
    stat += diff * diff / c.expected;
  }
  const double df = static_cast<double>(cells.size() - 1);
  return {stat, chi2_sf(stat, df), df};
}

TestResult chi2_homogeneity(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.empty() || b.empty()) throw DomainError("chi2_homogeneity: empty sample");
  std::map<std::int64_t, std::pair<double, double>> table;
  for (auto v : a) table[v].first += 1.0;
  for (auto v : b) table[v].second += 1.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double frac_a = na / (na + nb);
  const double frac_b = nb / (na + nb);
  auto ready = [&](const Cell& c) {
    const double total = c.observed_a + c.observed_b;
    return total * frac_a >= min_expected && total * frac_b >= min_expected;
  };
  std::vector<Cell> cells;
  Cell run;
  for (const auto& [value, obs] : table) {
    run.observed_a += obs.first;
    run.observed_b += obs.second;
    if (ready(run)) {
      cells.push_back(run);
      run = {};
    }
  }
  if (!cells.empty()) {
    cells.back().observed_a += run.observed_a;
    cells.back().observed_b += run.observed_b;
  }
  if (cells.size() < 2) {
    throw DegenerateDataError("chi2_homogeneity: fewer than two cells with expected count >= 5");
  }
  double stat = 0.0;
  for (const auto& c : cells) {
    const double total = c.observed_a + c.observed_b;
    const double ea = total * frac_a;
    const double eb = total * frac_b;
    stat += (c.observed_a - ea) * (c.observed_a - ea) / ea +
            (c.observed_b - eb) * (c.observed_b - eb) / eb;
  }
  const double df = static_cast<double>(cells.size() - 1);
  return {stat, chi2_sf(stat, df), df};
}

}  // namespace gnblab
