#pragma once

// Thin wrappers over Boost.Math so the rest of the code has one spelling
// for each special function.

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace gnblab {

inline double log_gamma(double x) { return boost::math::lgamma(x); }
inline double gamma_fn(double x) { return boost::math::tgamma(x); }

namespace detail {
// P(a, x) <= x^a e^{-x} / (Gamma(a + 1) (1 - x/(a + 1))) for x < a + 1. Boost
// raises overflow on its prefix long before this bound underflows, so
// callers short-circuit on it.
inline bool gamma_p_underflows(double a, double x) {
  if (!(x < 0.5 * (a + 1.0))) return false;
  return a * std::log(x) - x - boost::math::lgamma(a + 1.0) + std::numbers::ln2 < -745.0;
}
}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (x <= 0.0 || detail::gamma_p_underflows(a, x)) return 0.0;
  return boost::math::gamma_p(a, x);
}
/// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
  if (x <= 0.0 || detail::gamma_p_underflows(a, x)) return 1.0;
  return boost::math::gamma_q(a, x);
}
/// Regularized incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

/// Complement 1 - I_x(a, b), accurate when I_x(a, b) is close to 1.
inline double beta_inc_complement(double a, double b, double x) {
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return boost::math::ibetac(a, b, x);
}

/// Inverse of x -> I_x(a, b).
inline double beta_inc_inverse(double a, double b, double p) {
  return boost::math::ibeta_inv(a, b, p);
}

/// Inverse of x -> P(a, x).
inline double gamma_p_inverse(double a, double p) {
  return boost::math::gamma_p_inv(a, p);
}

/// Inverse of x -> Q(a, x).
inline double gamma_q_inverse(double a, double q) {
  return boost::math::gamma_q_inv(a, q);
}

/// Upper-tail chi-square probability with df degrees of freedom.
inline double chi2_sf(double statistic, double df) {
  return gamma_q(0.5 * df, 0.5 * statistic);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

inline double log_factorial(double k) { return log_gamma(k + 1.0); }

}  // namespace gnblab
