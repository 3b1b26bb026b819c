#include "gnblab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gnblab/errors.hpp"
#include "gnblab/quadrature.hpp"
#include "gnblab/samplers.hpp"
#include "gnblab/special.hpp"
#include "gnblab/stable.hpp"

namespace gnblab {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Integrand of the mixed Poisson probability after t = mu z^alpha, s = log t:
// exp(r s - e^s - lambda + k log lambda) / (k! Gamma(r)) with
// lambda = exp((s - log mu) / alpha). Strictly log-concave in s.
struct MixedPoissonKernel {
  double r;
  double alpha;
  double log_mu;
  double k;
  double norm;

  double log_lambda(double s) const { return (s - log_mu) / alpha; }

  double log_h(double s) const {
    const double ll = log_lambda(s);
    const double poisson = k == 0.0 ? -std::exp(ll) : k * ll - std::exp(ll);
    return r * s - std::exp(s) + poisson - norm;
  }

  double slope(double s) const {
    return r - std::exp(s) + (k - std::exp(log_lambda(s))) / alpha;
  }

  double curvature(double s) const {
    return -std::exp(s) - std::exp(log_lambda(s)) / (alpha * alpha);
  }
};

quad::Options relative_options(double rel) {
  quad::Options o;
  o.abs_tol = 1e-300;
  o.rel_tol = rel;
  return o;
}

}  // namespace

double PmfTable::mass_defect() const {
  double sum = tail_mass;
  for (double v : probs) sum += v;
  return std::abs(sum - 1.0);
}

void validate(const GGParams& p) {
  if (!finite_positive(p.r)) throw DomainError("GG: r must be positive");
  if (!finite_positive(p.lambda)) throw DomainError("GG: lambda must be positive");
  if (!std::isfinite(p.alpha) || p.alpha == 0.0) throw DomainError("GG: alpha must be nonzero");
}

void validate(const GNBParams& p) {
  if (!finite_positive(p.r)) throw DomainError("GNB: r must be positive");
  if (!finite_positive(p.mu)) throw DomainError("GNB: mu must be positive");
  if (!std::isfinite(p.alpha) || p.alpha == 0.0) throw DomainError("GNB: alpha must be nonzero");
}

void validate(const NBParams& p) {
  if (!finite_positive(p.r)) throw DomainError("NB: r must be positive");
  if (!(p.p > 0.0 && p.p < 1.0)) throw DomainError("NB: p must lie in (0, 1)");
}

void validate(const MixedGeomParams& p) {
  if (!(p.r > 0.0 && p.r <= 1.0)) throw DomainError("mixed geometric: r must lie in (0, 1]");
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
    throw DomainError("mixed geometric: alpha must lie in (0, 1]");
  }
  if (!finite_positive(p.mu)) throw DomainError("mixed geometric: mu must be positive");
}

double gg_pdf(const GGParams& p, double x) {
  validate(p);
  if (!(x >= 0.0)) throw DomainError("gg_pdf: x must be nonnegative");
  if (x == 0.0) {
    if (p.alpha < 0.0) return 0.0;
    const double ar = p.alpha * p.r;
    if (ar < 1.0) return inf;
    if (ar > 1.0) return 0.0;
    return std::exp(std::log(p.alpha) + p.r * std::log(p.lambda) - log_gamma(p.r));
  }
  if (std::isinf(x)) return 0.0;
  const double lx = std::log(x);
  const double power = std::exp(p.alpha * lx);
  return std::exp(std::log(std::abs(p.alpha)) + p.r * std::log(p.lambda) +
                  (p.alpha * p.r - 1.0) * lx - p.lambda * power - log_gamma(p.r));
}

double gg_cdf(const GGParams& p, double x) {
  validate(p);
  if (!(x >= 0.0)) throw DomainError("gg_cdf: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double t = p.lambda * std::pow(x, p.alpha);
  return p.alpha > 0.0 ? gamma_p(p.r, t) : gamma_q(p.r, t);
}

double gnb_log_pmf(const GNBParams& p, std::int64_t k) {
  validate(p);
  if (k < 0) throw DomainError("gnb_pmf: k must be nonnegative");
  const double kk = static_cast<double>(k);
  const MixedPoissonKernel kernel{p.r, p.alpha, std::log(p.mu), kk,
                                  log_factorial(kk) + log_gamma(p.r)};
  const double mode =
      quad::decreasing_root([&](double s) { return kernel.slope(s); }, 0.0, 1.0);
  const double peak = kernel.log_h(mode);
  const double width = 1.0 / std::sqrt(-kernel.curvature(mode));
  const auto w = quad::concave_window([&](double s) { return kernel.log_h(s); }, mode, width);
  auto integrand = [&](double s) { return std::exp(kernel.log_h(s) - peak); };
  const double pts[] = {w.lo, w.mode, w.hi};
  const auto r = quad::integrate_pieces(integrand, pts, relative_options(1e-12));
  return peak + std::log(quad::checked(r, "gnb_pmf: mixed Poisson integral"));
}

double gnb_pmf(const GNBParams& p, std::int64_t k) { return std::exp(gnb_log_pmf(p, k)); }

PmfTable gnb_pmf_table(const GNBParams& p, std::int64_t k_max) {
  validate(p);
  if (k_max < 0) throw DomainError("gnb_pmf_table: k_max must be nonnegative");
  PmfTable table;
  table.support_max = k_max;
  table.probs.reserve(static_cast<std::size_t>(k_max) + 1);
  for (std::int64_t k = 0; k <= k_max; ++k) table.probs.push_back(gnb_pmf(p, k));

  // P(N > K) = E P(Poisson(Lambda) >= K + 1) = E P(K + 1, Lambda), written
  // as an integral against the gamma weight of s = log(mu Lambda^alpha).
  const double kk = static_cast<double>(k_max) + 1.0;
  const double lg = log_gamma(p.r);
  auto log_w = [&](double s) { return p.r * s - std::exp(s) - lg; };
  const double mode = std::log(p.r);
  const auto w = quad::concave_window(log_w, mode, std::max(1.0, 1.0 / std::sqrt(p.r)));
  const double log_mu = std::log(p.mu);
  auto integrand = [&](double s) {
    const double lambda = std::exp((s - log_mu) / p.alpha);
    return std::exp(log_w(s)) * gamma_p(kk, lambda);
  };
  // gamma_p(K+1, lambda) switches from 0 to 1 around lambda = K + 1, over a
  // width of about alpha / sqrt(K + 1) in s; a coarse panel can step over it.
  const double s_switch = log_mu + p.alpha * std::log(kk);
  const double width = std::abs(p.alpha) / std::sqrt(kk);
  std::vector<double> pts = {w.lo, w.mode, w.hi};
  for (double m : {-8.0, -2.0, 0.0, 2.0, 8.0}) {
    pts.push_back(std::clamp(s_switch + m * width, w.lo, w.hi));
  }
  std::sort(pts.begin(), pts.end());
  quad::Options o;
  o.abs_tol = 1e-15;
  o.rel_tol = 1e-10;
  table.tail_mass = quad::checked(quad::integrate_pieces(integrand, pts, o),
                                  "gnb_pmf_table: tail mass");
  return table;
}

double nb_log_pmf(const NBParams& p, std::int64_t k) {
  validate(p);
  if (k < 0) throw DomainError("nb_pmf: k must be nonnegative");
  const double kk = static_cast<double>(k);
  return log_gamma(p.r + kk) - log_factorial(kk) - log_gamma(p.r) + p.r * std::log(p.p) +
         kk * std::log1p(-p.p);
}

double nb_pmf(const NBParams& p, std::int64_t k) { return std::exp(nb_log_pmf(p, k)); }

PmfTable nb_pmf_table(const NBParams& p, std::int64_t k_max) {
  validate(p);
  if (k_max < 0) throw DomainError("nb_pmf_table: k_max must be nonnegative");
  PmfTable table;
  table.support_max = k_max;
  for (std::int64_t k = 0; k <= k_max; ++k) table.probs.push_back(nb_pmf(p, k));
  table.tail_mass = beta_inc(static_cast<double>(k_max) + 1.0, p.r, 1.0 - p.p);
  return table;
}

McEstimate mixed_geometric_pmf(const std::function<double(RandomState&)>& draw_y,
                               std::int64_t k, std::int64_t n_mc, RandomState& rng) {
  if (k < 0) throw DomainError("mixed_geometric_pmf: k must be nonnegative");
  if (n_mc < 10000) throw DomainError("mixed_geometric_pmf: n_mc must be at least 10^4");
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t i = 0; i < n_mc; ++i) {
    const double y = draw_y(rng);
    const double v = y * std::pow(1.0 - y, static_cast<double>(k));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(n_mc);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

McEstimate mixed_geometric_pmf(const MixedGeomParams& p, std::int64_t k, std::int64_t n_mc,
                               RandomState& rng) {
  validate(p);
  return mixed_geometric_pmf([&](RandomState& g) { return sample_success_prob(p, g); }, k,
                             n_mc, rng);
}

namespace detail {

double mittag_leffler_series(double alpha, double x) {
  const double lx = std::log(x);
  double sum = 0.0;
  double largest = 0.0;
  for (int n = 0; n < 200000; ++n) {
    const double term = std::exp(alpha * n * lx - log_gamma(alpha * (n + 1.0)));
    sum += (n % 2 == 0) ? term : -term;
    largest = std::max(largest, term);
    // Terms eventually decrease monotonically; stop once past the largest.
    if (term < largest && term < 1e-17 * largest && alpha * n > x) break;
  }
  return std::exp((alpha - 1.0) * lx) * sum;
}

double mittag_leffler_integral(double alpha, double x) {
  const double c = std::cos(pi * alpha);
  auto integrand = [&](double u) {
    const double za = std::exp(alpha * u);
    const double denom = 1.0 + za * za + 2.0 * za * c;
    return std::exp((alpha + 1.0) * u - x * std::exp(u)) / denom;
  };
  const double center = std::log((alpha + 1.0) / x);
  const double lo = center - 50.0 / (alpha + 1.0);
  const double hi = std::log((alpha + 81.0) / x);
  std::vector<double> pts = {lo, center, hi};
  if (lo < 0.0 && hi > 0.0) pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const auto r = quad::integrate_pieces(integrand, pts, relative_options(1e-12));
  return std::sin(pi * alpha) / pi * quad::checked(r, "mittag_leffler_pdf: integral");
}

}  // namespace detail

double mittag_leffler_pdf(double alpha, double x) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("mittag_leffler_pdf: alpha must lie in (0, 1]");
  }
  if (!(x > 0.0)) throw DomainError("mittag_leffler_pdf: x must be positive");
  if (alpha == 1.0) return std::exp(-x);
  if (std::isinf(x)) return 0.0;
  if (x <= detail::mittag_leffler_crossover) return detail::mittag_leffler_series(alpha, x);
  return detail::mittag_leffler_integral(alpha, x);
}

double linnik_pdf(double alpha, double x, double tol) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("linnik_pdf: alpha must lie in (0, 2]");
  if (!(tol > 0.0)) throw DomainError("linnik_pdf: tol must be positive");
  const double ax = std::abs(x);
  const double a = alpha / 2.0;
  if (ax == 0.0 && alpha <= 1.0) return inf;
  // Below 1e-100 the mixture integrand lives where x^2 underflows; the
  // leading small-x terms are exact to far below double precision there.
  if (ax < 1e-100 && alpha < 1.0) {
    return std::pow(ax, alpha - 1.0) / (2.0 * gamma_fn(alpha) * std::cos(pi * alpha / 2.0));
  }
  if (ax < 1e-100 && alpha == 1.0) {
    return -(std::log(ax) + std::numbers::egamma) / pi;
  }
  // Normal mixture over M_{alpha/2} in v = log m:
  //   f(x) = int exp(-x^2 / (4m)) / sqrt(4 pi m) f^M(m; alpha/2) m dv.
  auto integrand = [&](double v) {
    const double m = std::exp(v);
    if (m == 0.0 || std::isinf(m)) return 0.0;
    const double gauss = std::exp(-ax * ax / (4.0 * m) - 0.5 * std::log(4.0 * pi * m));
    if (gauss == 0.0) return 0.0;
    return gauss * mittag_leffler_pdf(a, m) * m;
  };
  quad::Options o;
  o.abs_tol = tol;
  o.rel_tol = 1e-10;
  const double center = ax > 0.0 ? std::log(ax * ax / 4.0 + 0.5) : 0.0;
  const auto r = quad::integrate_line(integrand, center, 1.0, o, 1e-15);
  return quad::checked(r, "linnik_pdf: normal mixture");
}

double stable_ratio_pdf(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("stable_ratio_pdf: alpha must lie in (0, 1)");
  if (!(x > 0.0)) throw DomainError("stable_ratio_pdf: x must be positive");
  if (std::isinf(x)) return 0.0;
  const double xa = std::pow(x, alpha);
  return std::sin(pi * alpha) * xa / x / (pi * (1.0 + xa * xa + 2.0 * xa * std::cos(pi * alpha)));
}

double stable_ratio_cdf(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("stable_ratio_cdf: alpha must lie in (0, 1)");
  if (!(x >= 0.0)) throw DomainError("stable_ratio_cdf: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  // Antiderivative of the density in u = x^alpha.
  const double xa = std::pow(x, alpha);
  const double v = std::atan((xa + std::cos(pi * alpha)) / std::sin(pi * alpha)) -
                   pi / 2.0 + pi * alpha;
  return std::clamp(v / (pi * alpha), 0.0, 1.0);
}

double gleser_mixing_pdf(double r, double mu, double z) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("gleser_mixing_pdf: r must lie in (0, 1)");
  if (!finite_positive(mu)) throw DomainError("gleser_mixing_pdf: mu must be positive");
  if (z < mu) return 0.0;
  if (z == mu) return inf;
  return std::exp(r * std::log(mu) - log_gamma(1.0 - r) - log_gamma(r) -
                  r * std::log(z - mu) - std::log(z));
}

double gleser_mixing_cdf(double r, double mu, double z) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("gleser_mixing_cdf: r must lie in (0, 1)");
  if (!finite_positive(mu)) throw DomainError("gleser_mixing_cdf: mu must be positive");
  if (z <= mu) return 0.0;
  // Z = mu / B with B ~ Beta(r, 1 - r).
  return beta_inc_complement(r, 1.0 - r, mu / z);
}

double snedecor_fisher_pdf(double r, double x) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("snedecor_fisher_pdf: r must lie in (0, 1)");
  if (!(x > 0.0)) throw DomainError("snedecor_fisher_pdf: x must be positive");
  if (std::isinf(x)) return 0.0;
  return std::exp((1.0 - r) * std::log(1.0 - r) + r * std::log(r) - log_gamma(1.0 - r) -
                  log_gamma(r) - r * std::log(x)) /
         (r + (1.0 - r) * x);
}

double snedecor_fisher_cdf(double r, double x) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("snedecor_fisher_cdf: r must lie in (0, 1)");
  if (!(x >= 0.0)) throw DomainError("snedecor_fisher_cdf: x must be nonnegative");
  if (std::isinf(x)) return 1.0;
  const double t = (1.0 - r) * x;
  return beta_inc(1.0 - r, r, t / (t + r));
}

double success_prob_pdf(const MixedGeomParams& p, double y) {
  validate(p);
  if (!(y > 0.0 && y < 1.0)) throw DomainError("success_prob_pdf: y must lie in (0, 1)");
  const double jac = 1.0 / ((1.0 - y) * (1.0 - y));
  return success_odds_pdf(p, y / (1.0 - y)) * jac;
}

double success_odds_pdf(const MixedGeomParams& p, double w) {
  validate(p);
  if (!(w > 0.0)) throw DomainError("success_odds_pdf: w must be positive");
  if (std::isinf(w)) return 0.0;
  const double inv_a = 1.0 / p.alpha;
  if (p.alpha == 1.0) {
    if (p.r == 1.0) throw DomainError("success_prob_pdf: Y is degenerate for r = alpha = 1");
    return gleser_mixing_pdf(p.r, p.mu, w);
  }
  const StableParams one_sided{p.alpha, 1.0};
  if (p.r == 1.0) {
    const double scale = std::pow(p.mu, -inv_a);
    return stable_pdf(one_sided, w * scale) * scale;
  }
  // X = S Z^{1/alpha}; after z = mu + u^{1/(1-r)} the (z - mu)^{-r}
  // singularity of the mixing density disappears.
  const double e = 1.0 / (1.0 - p.r);
  const double u_scale = std::pow(std::max(p.mu, std::pow(w, p.alpha)), 1.0 - p.r);
  auto integrand = [&](double t) {
    const double u = u_scale * t;
    const double z = p.mu + std::pow(u, e);
    if (std::isinf(z)) return 0.0;
    const double zi = std::pow(z, -inv_a);
    return stable_pdf(one_sided, w * zi) * zi / z;
  };
  quad::Options o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-9;
  const auto r = quad::integrate_to_infinity(integrand, 0.0, o);
  const double integral = u_scale * e * quad::checked(r, "success_prob_pdf: mixture integral");
  const double c = std::exp(p.r * std::log(p.mu) - log_gamma(1.0 - p.r) - log_gamma(p.r));
  return c * integral;
}

}  // namespace gnblab
