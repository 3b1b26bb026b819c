#pragma once

// Limit laws of random sums with GNB-distributed indices: the gamma-mixed
// one-sided stable law A, its symmetric counterpart H and the generalized
// variance gamma family.

#include "gnblab/random.hpp"

namespace gnblab {

/// A(x; r, alpha, alpha') is the law of S_{alpha,1} G_{r,1}^{1/(alpha alpha')};
/// H(x; r, alpha, alpha') is the law of S_{alpha,0} G_{r,1}^{1/(alpha alpha')}.
struct GammaMixedStableParams {
  double r = 1.0;
  double alpha = 1.0;
  double alpha_prime = 1.0;
};

/// Law of X sqrt(G*_{r,alpha,mu}) with X standard normal. alpha < 0 gives the
/// inverse-gamma-type mixing of the sample-mean limit.
struct GVGParams {
  double r = 1.0;
  double alpha = 1.0;
  double mu = 1.0;
};

void validate(const GammaMixedStableParams& p);
void validate(const GVGParams& p);

/// A(x), 0 < alpha <= 1.
double a_cdf(const GammaMixedStableParams& p, double x);
/// E A^beta = Gamma(1-beta/alpha) Gamma(r+beta/(alpha alpha')) / (Gamma(1-beta) Gamma(r)),
/// 0 <= beta < alpha <= 1.
double a_moment(const GammaMixedStableParams& p, double beta);

/// H(x), 0 < alpha < 2.
double h_cdf(const GammaMixedStableParams& p, double x);
/// E|H|^beta, 0 <= beta < alpha < 2.
double h_abs_moment(const GammaMixedStableParams& p, double beta);

/// H(x) computed as the mixture of F(x z^{-1/alpha_star}; alpha_star, 0)
/// against A(z; r, alpha/alpha_star, alpha'), alpha < alpha_star <= 2.
/// Agrees with h_cdf for every admissible alpha_star.
double a_cdf_general(const GammaMixedStableParams& p, double alpha_star, double x);

double gvg_cdf(const GVGParams& p, double x);
/// E|X sqrt(G*)|^beta = 2^{beta/2} Gamma((beta+1)/2) Gamma(r + beta/(2 alpha))
///                      / (sqrt(pi) mu^{beta/(2 alpha)} Gamma(r)).
double gvg_abs_moment(const GVGParams& p, double beta);

double sample_a(const GammaMixedStableParams& p, RandomState& rng);
double sample_h(const GammaMixedStableParams& p, RandomState& rng);
double sample_gvg(const GVGParams& p, RandomState& rng);

}  // namespace gnblab
