#pragma once

// Strictly stable laws S_{alpha,theta} with characteristic function
//   exp{-|t|^alpha exp(-i pi theta alpha sign(t) / 2)},
// 0 < alpha <= 2, |theta| <= min(1, 2/alpha - 1). theta = 1 with alpha <= 1
// gives the one-sided laws on [0, inf) with Laplace transform exp(-s^alpha).

#include "gnblab/random.hpp"

namespace gnblab {

struct StableParams {
  double alpha = 1.0;
  double theta = 0.0;
};

/// Throws DomainError when (alpha, theta) is not admissible.
void validate(const StableParams& p);

/// True for (1, +1) and (1, -1), the laws degenerate at +1 / -1.
bool is_degenerate(const StableParams& p);

/// Density f(x; alpha, theta). Closed forms for the normal, Cauchy and Levy
/// cases, a Zolotarev-type angular integral otherwise.
double stable_pdf(const StableParams& p, double x);

/// Distribution function F(x; alpha, theta).
double stable_cdf(const StableParams& p, double x);

/// E|S|^beta for theta = 0 (0 < beta < alpha) or E S^beta for theta = 1
/// (0 < beta < alpha <= 1).
double stable_abs_moment(const StableParams& p, double beta);

/// Exact draw of S_{alpha,1}, 0 < alpha <= 1 (Kanter's representation).
/// Returns exactly 1 for alpha = 1.
double sample_one_sided(double alpha, RandomState& rng);

/// Exact draw of S_{alpha,0} by the Chambers-Mallows-Stuck transform.
double sample_symmetric(double alpha, RandomState& rng);

/// Exact draw of S_{alpha,theta} for any admissible pair.
double sample_stable(const StableParams& p, RandomState& rng);

/// R_alpha = S_{alpha,1} / S'_{alpha,1}, 0 < alpha < 1.
double sample_ratio(double alpha, RandomState& rng);

namespace detail {
// The angular-integral evaluators without the closed-form shortcuts; exposed
// so the closed forms can serve as oracles for them.
double stable_pdf_integral(double alpha, double theta, double x);
double stable_cdf_integral(double alpha, double theta, double x);
}  // namespace detail

}  // namespace gnblab
