#pragma once

// Goodness-of-fit machinery for the verification harness.

#include <cstdint>
#include <functional>
#include <span>

#include "gnblab/distributions.hpp"

namespace gnblab {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  /// Degrees of freedom for chi-square tests; effective sample size for KS.
  double df = 0.0;
};

/// Survival function of the Kolmogorov distribution,
/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);
/// lambda with kolmogorov_sf(lambda) = p, 0 < p < 1.
double kolmogorov_isf(double p);
/// x with chi2_sf(x, df) = p.
double chi2_isf(double p, double df);

/// Two-sample Kolmogorov-Smirnov: exact sup-distance of the empirical CDFs,
/// asymptotic p-value at the effective size na nb / (na + nb).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// One-sample KS against a continuous CDF.
TestResult ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf);

/// KS critical distance at significance `level` for effective size n_eff.
double ks_critical(double level, double n_eff);

/// Pearson goodness of fit against a PMF table. Values above support_max
/// fall into a tail cell with expectation n * tail_mass; cells with
/// expected count below 5 are pooled with their neighbours.
TestResult chi2_discrete(std::span<const std::int64_t> samples, const PmfTable& pmf);

/// Pearson homogeneity test of two integer samples with pooled cells.
TestResult chi2_homogeneity(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

}  // namespace gnblab
