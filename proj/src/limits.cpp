#include "gnblab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gnblab/errors.hpp"
#include "gnblab/quadrature.hpp"
#include "gnblab/samplers.hpp"
#include "gnblab/special.hpp"
#include "gnblab/stable.hpp"

namespace gnblab {

namespace {

// Mass of the mixing law left outside the quadrature window on each side.
constexpr double window_tail = 1e-9;

quad::Options mixture_options() {
  quad::Options o;
  o.abs_tol = 1e-9;
  o.rel_tol = 1e-9;
  return o;
}

// Window for s = log G_{r,1} holding all but window_tail of the mass on
// each side.
std::pair<double, double> log_gamma_window(double r) {
  const double q_lo = gamma_p_inverse(r, window_tail);
  // For small r the quantile underflows; P(G < z) ~ z^r / Gamma(r + 1) there.
  const double s_lo = q_lo > 1e-300 ? std::log(q_lo)
                                    : (std::log(window_tail) + log_gamma(r + 1.0)) / r;
  const double s_hi = std::log(gamma_q_inverse(r, window_tail));
  return {s_lo, s_hi};
}

// E g(log G_{r,1}) for g with values in [0, 1]. The excluded tails are
// charged g at the window edges, so the truncation error is below
// 2 * window_tail.
template <class G>
double gamma_log_mixture(G&& g, double r, std::vector<double> breaks, const char* what) {
  const auto [s_lo, s_hi] = log_gamma_window(r);
  const double log_norm = log_gamma(r);
  auto integrand = [&](double s) {
    const double w = std::exp(r * s - std::exp(s) - log_norm);
    return w == 0.0 ? 0.0 : w * g(s);
  };
  breaks.push_back(std::log(r));
  std::vector<double> pts{s_lo, s_hi};
  for (double b : breaks) {
    if (std::isfinite(b) && b > s_lo && b < s_hi) pts.push_back(b);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const double body = quad::checked(quad::integrate_pieces(integrand, pts, mixture_options()), what);
  const double value = body + window_tail * (g(s_lo) + g(s_hi));
  return std::clamp(value, 0.0, 1.0);
}

// F(exp(log_y); alpha, theta) with saturation outside the double range.
double stable_cdf_log_arg(const StableParams& sp, double log_y) {
  if (log_y > 700.0) return 1.0;
  if (log_y < -700.0) return sp.theta == 1.0 ? 0.0 : 0.5 * (1.0 - sp.theta);
  return stable_cdf(sp, std::exp(log_y));
}

void require_moment_order(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw DomainError("moment order beta must be nonnegative");
  }
}

}  // namespace

void validate(const GammaMixedStableParams& p) {
  if (!(p.r > 0.0) || !std::isfinite(p.r)) throw DomainError("limits: r must be positive");
  if (!(p.alpha > 0.0 && p.alpha < 2.0)) throw DomainError("limits: alpha must lie in (0, 2)");
  if (!(p.alpha_prime != 0.0) || !std::isfinite(p.alpha_prime)) {
    throw DomainError("limits: alpha' must be a nonzero real");
  }
}

void validate(const GVGParams& p) {
  if (!(p.r > 0.0) || !std::isfinite(p.r)) throw DomainError("gvg: r must be positive");
  if (!(p.mu > 0.0) || !std::isfinite(p.mu)) throw DomainError("gvg: mu must be positive");
  if (!(p.alpha != 0.0) || !std::isfinite(p.alpha)) {
    throw DomainError("gvg: alpha must be a nonzero real");
  }
}

double a_cdf(const GammaMixedStableParams& p, double x) {
  validate(p);
  if (p.alpha > 1.0) throw DomainError("a_cdf: alpha must lie in (0, 1]");
  if (std::isnan(x)) throw DomainError("a_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_x = std::log(x);
  if (p.alpha == 1.0) {
    // S_{1,1} = 1, so A is the law of G^{1/alpha'}.
    const double g = std::exp(p.alpha_prime * log_x);
    return p.alpha_prime > 0.0 ? gamma_p(p.r, g) : gamma_q(p.r, g);
  }
  const double k = p.alpha * p.alpha_prime;
  const StableParams sp{p.alpha, 1.0};
  auto g = [&](double s) { return stable_cdf_log_arg(sp, log_x - s / k); };
  const double s0 = k * log_x;
  return gamma_log_mixture(g, p.r, {s0 - 4.0 * std::abs(k), s0, s0 + 4.0 * std::abs(k)},
                           "a_cdf: mixture quadrature did not converge");
}

double a_moment(const GammaMixedStableParams& p, double beta) {
  validate(p);
  if (p.alpha > 1.0) throw DomainError("a_moment: alpha must lie in (0, 1]");
  require_moment_order(beta);
  if (beta >= p.alpha) {
    throw DomainError("a_moment: moments of order beta >= alpha do not exist");
  }
  const double shape = p.r + beta / (p.alpha * p.alpha_prime);
  if (!(shape > 0.0)) throw DomainError("a_moment: requires r + beta/(alpha alpha') > 0");
  if (beta == 0.0) return 1.0;
  return std::exp(log_gamma(1.0 - beta / p.alpha) - log_gamma(1.0 - beta) +
                  log_gamma(shape) - log_gamma(p.r));
}

double h_cdf(const GammaMixedStableParams& p, double x) {
  validate(p);
  if (std::isnan(x)) throw DomainError("h_cdf: x is NaN");
  if (x == 0.0) return 0.5;
  if (x < 0.0) return 1.0 - h_cdf(p, -x);
  if (std::isinf(x)) return 1.0;
  const double log_x = std::log(x);
  const double k = p.alpha * p.alpha_prime;
  const StableParams sp{p.alpha, 0.0};
  auto g = [&](double s) { return stable_cdf_log_arg(sp, log_x - s / k); };
  const double s0 = k * log_x;
  return gamma_log_mixture(g, p.r, {s0 - 4.0 * std::abs(k), s0, s0 + 4.0 * std::abs(k)},
                           "h_cdf: mixture quadrature did not converge");
}

double h_abs_moment(const GammaMixedStableParams& p, double beta) {
  validate(p);
  require_moment_order(beta);
  if (beta >= p.alpha) {
    throw DomainError("h_abs_moment: moments of order beta >= alpha do not exist");
  }
  const double shape = p.r + beta / (p.alpha * p.alpha_prime);
  if (!(shape > 0.0)) throw DomainError("h_abs_moment: requires r + beta/(alpha alpha') > 0");
  if (beta == 0.0) return 1.0;
  return stable_abs_moment({p.alpha, 0.0}, beta) *
         std::exp(log_gamma(shape) - log_gamma(p.r));
}

double a_cdf_general(const GammaMixedStableParams& p, double alpha_star, double x) {
  validate(p);
  if (!(alpha_star > p.alpha && alpha_star <= 2.0)) {
    throw DomainError("a_cdf_general: alpha_star must lie in (alpha, 2]");
  }
  if (std::isnan(x)) throw DomainError("a_cdf_general: x is NaN");
  if (x == 0.0) return 0.5;
  if (x < 0.0) return 1.0 - a_cdf_general(p, alpha_star, -x);
  if (std::isinf(x)) return 1.0;

  // H(x) = E F(x Z^{-1/alpha*}; alpha*, 0) with Z ~ A(.; r, alpha/alpha*, alpha').
  // Integrating by parts in u = log z:
  //   H(x) = 1 - int (1 - A(e^u)) k(u) du,  k(u) = f(y; alpha*, 0) y / alpha*,
  // y = x e^{-u/alpha*}; k integrates to 1/2 over the line.
  const GammaMixedStableParams inner{p.r, p.alpha / alpha_star, p.alpha_prime};
  const StableParams outer{alpha_star, 0.0};
  auto density = [&](double y) {
    if (alpha_star == 2.0) return std::exp(-0.25 * y * y) * 0.5 * std::numbers::inv_sqrtpi;
    return stable_pdf(outer, y);
  };
  const double log_x = std::log(x);
  auto integrand = [&](double u) {
    const double log_y = log_x - u / alpha_star;
    if (log_y > 300.0) return 0.0;
    const double y = std::exp(log_y);
    const double kernel = density(y) * y / alpha_star;
    if (kernel == 0.0) return 0.0;
    return (1.0 - a_cdf(inner, std::exp(u))) * kernel;
  };
  quad::Options opts;
  opts.abs_tol = 1e-8;
  opts.rel_tol = 1e-8;
  const double center = alpha_star * log_x;
  const auto r = quad::integrate_line(integrand, center, 1.0, opts, 1e-10, 400);
  const double tail = quad::checked(r, "a_cdf_general: outer quadrature did not converge");
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

double gvg_cdf(const GVGParams& p, double x) {
  validate(p);
  if (std::isnan(x)) throw DomainError("gvg_cdf: x is NaN");
  if (x == 0.0) return 0.5;
  if (x < 0.0) return 1.0 - gvg_cdf(p, -x);
  if (std::isinf(x)) return 1.0;
  // G* = exp((s - log mu) / alpha) with s = log G_{r,1}.
  const double log_mu = std::log(p.mu);
  const double log_x = std::log(x);
  auto g = [&](double s) {
    const double log_arg = log_x - 0.5 * (s - log_mu) / p.alpha;
    if (log_arg > 10.0) return 1.0;
    if (log_arg < -700.0) return 0.5;
    return normal_cdf(std::exp(log_arg));
  };
  const double s0 = log_mu + 2.0 * p.alpha * log_x;
  return gamma_log_mixture(g, p.r, {s0}, "gvg_cdf: mixture quadrature did not converge");
}

double gvg_abs_moment(const GVGParams& p, double beta) {
  validate(p);
  require_moment_order(beta);
  const double q = beta / (2.0 * p.alpha);
  if (!(p.r + q > 0.0)) throw DomainError("gvg_abs_moment: requires r + beta/(2 alpha) > 0");
  if (beta == 0.0) return 1.0;
  return std::exp(0.5 * beta * std::numbers::ln2 + log_gamma(0.5 * (beta + 1.0)) +
                  log_gamma(p.r + q) - q * std::log(p.mu) - log_gamma(p.r)) *
         std::numbers::inv_sqrtpi;
}

double sample_a(const GammaMixedStableParams& p, RandomState& rng) {
  validate(p);
  if (p.alpha > 1.0) throw DomainError("sample_a: alpha must lie in (0, 1]");
  const double s = sample_one_sided(p.alpha, rng);
  return s * std::exp(sample_log_gamma(p.r, rng) / (p.alpha * p.alpha_prime));
}

double sample_h(const GammaMixedStableParams& p, RandomState& rng) {
  validate(p);
  const double s = sample_symmetric(p.alpha, rng);
  return s * std::exp(sample_log_gamma(p.r, rng) / (p.alpha * p.alpha_prime));
}

double sample_gvg(const GVGParams& p, RandomState& rng) {
  validate(p);
  const double x = standard_normal(rng);
  return x * std::exp(0.5 * (sample_log_gamma(p.r, rng) - std::log(p.mu)) / p.alpha);
}

}  // namespace gnblab
