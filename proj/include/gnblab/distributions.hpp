#pragma once

// Densities, distribution functions and probability mass functions of the
// generalized gamma family and the laws built from it.

#include <cstdint>
#include <functional>
#include <vector>

#include "gnblab/random.hpp"

namespace gnblab {

/// Generalized gamma law G*_{r,alpha,lambda}: density
/// |alpha| lambda^r x^{alpha r - 1} exp(-lambda x^alpha) / Gamma(r).
/// lambda is the same scale parameter called mu elsewhere.
struct GGParams {
  double r = 1.0;
  double alpha = 1.0;
  double lambda = 1.0;
};

/// Mixed Poisson law N_{r,alpha,mu} with G*_{r,alpha,mu} mixing.
struct GNBParams {
  double r = 1.0;
  double alpha = 1.0;
  double mu = 1.0;
};

/// Negative binomial N_{r,p}: Gamma(r+k) p^r (1-p)^k / (k! Gamma(r)).
struct NBParams {
  double r = 1.0;
  double p = 0.5;
};

/// Law of the random success probability Y_{r,alpha,mu}.
struct MixedGeomParams {
  double r = 0.5;
  double alpha = 0.5;
  double mu = 1.0;
};

/// Materialized PMF on 0..support_max; tail_mass is P(N > support_max),
/// computed independently of the listed probabilities.
struct PmfTable {
  std::int64_t support_max = 0;
  std::vector<double> probs;
  double tail_mass = 0.0;

  /// |sum(probs) + tail_mass - 1|.
  double mass_defect() const;
};

/// Monte Carlo estimate with its standard error.
struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

void validate(const GGParams& p);
void validate(const GNBParams& p);
void validate(const NBParams& p);
void validate(const MixedGeomParams& p);

/// Returns +inf at x = 0 when alpha r < 1 (unbounded density).
double gg_pdf(const GGParams& p, double x);
double gg_cdf(const GGParams& p, double x);

double gnb_pmf(const GNBParams& p, std::int64_t k);
/// log P(N = k); stays finite where the probability underflows.
double gnb_log_pmf(const GNBParams& p, std::int64_t k);
PmfTable gnb_pmf_table(const GNBParams& p, std::int64_t k_max);

double nb_pmf(const NBParams& p, std::int64_t k);
double nb_log_pmf(const NBParams& p, std::int64_t k);
PmfTable nb_pmf_table(const NBParams& p, std::int64_t k_max);

/// E[Y (1 - Y)^k] over n_mc draws of Y_{r,alpha,mu}; n_mc >= 10^4.
McEstimate mixed_geometric_pmf(const MixedGeomParams& p, std::int64_t k,
                               std::int64_t n_mc, RandomState& rng);
/// Same estimate with a caller-supplied law of Y.
McEstimate mixed_geometric_pmf(const std::function<double(RandomState&)>& draw_y,
                               std::int64_t k, std::int64_t n_mc, RandomState& rng);

/// Mittag-Leffler density f^M(x; alpha), 0 < alpha <= 1, x > 0.
double mittag_leffler_pdf(double alpha, double x);
namespace detail {
double mittag_leffler_series(double alpha, double x);
double mittag_leffler_integral(double alpha, double x);
inline constexpr double mittag_leffler_crossover = 3.0;
}  // namespace detail

/// Linnik density f^L(x; alpha), 0 < alpha <= 2, to absolute accuracy tol.
/// +inf at x = 0 for alpha <= 1.
double linnik_pdf(double alpha, double x, double tol = 1e-10);

/// Density v_alpha of R_alpha = S_{alpha,1} / S'_{alpha,1}, 0 < alpha < 1.
double stable_ratio_pdf(double alpha, double x);
double stable_ratio_cdf(double alpha, double x);

/// Mixing density p(z; r, mu) of the mixed exponential representation of a
/// gamma law, 0 < r < 1. +inf at z = mu.
double gleser_mixing_pdf(double r, double mu, double z);
double gleser_mixing_cdf(double r, double mu, double z);

/// Snedecor-Fisher density q(x; 1-r, r), 0 < r < 1.
double snedecor_fisher_pdf(double r, double x);
double snedecor_fisher_cdf(double r, double x);

/// Density of Y_{r,alpha,mu} on (0, 1).
double success_prob_pdf(const MixedGeomParams& p, double y);
/// Density of the odds Y / (1 - Y) on (0, inf). For heavy mixing (small
/// alpha r) a visible share of the mass of Y sits within 1e-16 of 1, where
/// y itself is not representable; the odds keep that tail.
double success_odds_pdf(const MixedGeomParams& p, double w);

}  // namespace gnblab
