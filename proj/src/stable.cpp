#include "gnblab/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gnblab/errors.hpp"
#include "gnblab/quadrature.hpp"
#include "gnblab/special.hpp"

namespace gnblab {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double param_slack = 1e-12;

bool is_levy(const StableParams& p) {
  return p.alpha == 0.5 && std::abs(p.theta) == 1.0;
}

quad::Options angular_options() {
  quad::Options o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-11;
  o.max_intervals = 2000;
  return o;
}

// log t(phi) for x > 0 in the angular representation, phi in (-theta0, pi/2).
// The integrand is evaluated through the offsets u = phi + theta0 and
// v = pi/2 - phi, and each half of the range is integrated in the offset that
// is small there: for large |x| the mass crowds against an endpoint, where
// phi itself cannot resolve it.
struct AngularKernel {
  double alpha;
  double theta0;
  double log_c;  // (alpha / (alpha - 1)) * log x
  double rho;    // pi/2 - theta0, formed from theta so that it is exact at theta = 1

  AngularKernel(double a, double theta, double x)
      : alpha(a),
        theta0(pi * theta / 2.0),
        log_c((a / (a - 1.0)) * std::log(x)),
        rho(pi * (1.0 - theta) / 2.0) {}

  double span() const { return pi / 2 + theta0; }

  // Every factor is a sine of an argument that stays accurate when the
  // offset on its own side is tiny.
  double log_t(double u, double v) const {
    const double a = alpha;
    const double e = a / (a - 1.0);
    double s, c, k;
    if (u < v) {
      s = std::sin(a * u);
      c = std::sin(rho + u);
      k = std::sin(rho + (1.0 - a) * u);
    } else {
      s = std::sin(a * (span() - v));
      c = std::sin(v);
      k = std::cos(a * theta0 + (a - 1.0) * (pi / 2 - v));
    }
    if (!(s > 0.0) || !(c > 0.0) || !(k > 0.0)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return log_c + e * (std::log(c) - std::log(s)) + std::log(k) - std::log(c);
  }
  double log_t_left(double u) const { return log_t(u, span() - u); }
  double log_t_right(double v) const { return log_t(span() - v, v); }
};

// Integral of h(offset) over offset in (0, top], taken in w = log(offset).
// Near the endpoint log t is close to linear in w, so the integrand becomes a
// bump of unit-order width wherever t = 1 falls, however close to the
// endpoint that is. Breakpoints are spread geometrically around `anchor`.
template <class H>
quad::Result offset_integral(H&& h, double top, double anchor, const quad::Options& opts) {
  constexpr double w_floor = -690.0;
  auto f = [&](double w) {
    const double o = std::exp(w);
    const double v = h(o);
    return v == 0.0 ? 0.0 : v * o;
  };
  const double w_top = std::log(top);
  const double w_anchor = std::max(std::log(anchor), w_floor);
  std::vector<double> pts{w_floor, w_anchor, w_top};
  for (double d = 0.125; d < 1024.0; d *= 8.0) {
    if (w_anchor - d > w_floor) pts.push_back(w_anchor - d);
    if (w_anchor + d < w_top) pts.push_back(w_anchor + d);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return quad::integrate_pieces(f, pts, opts);
}

// Integral of g(log t) over the angular range. Each half is integrated in the
// offset from its own endpoint, anchored at the point where log t = 0 (where
// the integrands peak or switch regime).
template <class G>
quad::Result angular_integral(const AngularKernel& kernel, G&& g) {
  const double half = 0.5 * kernel.span();
  // log t is monotone in phi; find the side of the midpoint holding the root.
  const double probe_lo = kernel.log_t_left(1e-9 * half);
  const double probe_hi = kernel.log_t_right(1e-9 * half);
  const bool increasing = std::isnan(probe_lo) || probe_lo < probe_hi;
  auto below = [&](double lt) { return std::isnan(lt) ? increasing : lt < 0.0; };
  const bool root_right = below(kernel.log_t_left(half)) == increasing;

  // Bisection in log(offset) so that roots very close to an endpoint are
  // located to full relative precision.
  auto bisect = [&](auto&& lt_of, bool grows) {
    double lo = -690.0, hi = std::log(half);
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      (below(lt_of(std::exp(mid))) == grows ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
  };
  auto left = [&](double u) { return g(kernel.log_t_left(u)); };
  auto right = [&](double v) { return g(kernel.log_t_right(v)); };
  const auto opts = angular_options();
  double anchor_left = half, anchor_right = half;
  if (root_right) {
    anchor_right = bisect([&](double v) { return kernel.log_t_right(v); }, !increasing);
  } else {
    anchor_left = bisect([&](double u) { return kernel.log_t_left(u); }, increasing);
  }
  const auto a = offset_integral(left, half, anchor_left, opts);
  const auto b = offset_integral(right, half, anchor_right, opts);
  quad::Result r;
  r.value = a.value + b.value;
  r.abs_error = a.abs_error + b.abs_error;
  r.evaluations = a.evaluations + b.evaluations;
  r.converged = (a.converged && b.converged) ||
                r.abs_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(r.value));
  return r;
}

// Positive-half-line pieces; x > 0, alpha != 1.
double pdf_positive(double alpha, double theta, double x) {
  const double theta0 = pi * theta / 2.0;
  if (theta0 <= -pi / 2 + 1e-15) return 0.0;  // one-sided law on (-inf, 0]
  AngularKernel kernel(alpha, theta, x);
  auto r = angular_integral(kernel, [](double lt) {
    if (std::isnan(lt) || lt > 6.6e2) return 0.0;
    const double t = std::exp(lt);
    return t * std::exp(-t);
  });
  const double integral = quad::checked(r, "stable_pdf: angular integral");
  if (integral == 0.0) return 0.0;  // scale overflows for subnormal x
  return alpha / (pi * std::abs(alpha - 1.0)) * (integral / x);
}

double cdf_positive(double alpha, double theta, double x) {
  const double theta0 = pi * theta / 2.0;
  const double c1 = alpha < 1.0 ? (pi / 2 - theta0) / pi : 1.0;
  if (theta0 <= -pi / 2 + 1e-15) return 1.0;
  AngularKernel kernel(alpha, theta, x);
  auto r = angular_integral(kernel, [](double lt) {
    if (std::isnan(lt) || lt > 6.6e2) return 0.0;
    return std::exp(-std::exp(lt));
  });
  const double integral = quad::checked(r, "stable_cdf: angular integral");
  const double sign = alpha < 1.0 ? 1.0 : -1.0;
  return std::clamp(c1 + sign * integral / pi, 0.0, 1.0);
}

}  // namespace

void validate(const StableParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) {
    throw DomainError("stable: alpha must lie in (0, 2]");
  }
  const double bound = std::min(1.0, 2.0 / p.alpha - 1.0);
  if (!(std::abs(p.theta) <= bound + param_slack)) {
    throw DomainError("stable: |theta| must not exceed min(1, 2/alpha - 1)");
  }
}

bool is_degenerate(const StableParams& p) {
  return p.alpha == 1.0 && std::abs(p.theta) == 1.0;
}

namespace detail {

double stable_pdf_integral(double alpha, double theta, double x) {
  if (x == 0.0) {
    if (alpha < 1.0 && std::abs(theta) == 1.0) return 0.0;
    return gamma_fn(1.0 + 1.0 / alpha) * std::cos(pi * theta / 2.0) / pi;
  }
  if (x > 0.0) return pdf_positive(alpha, theta, x);
  return pdf_positive(alpha, -theta, -x);
}

double stable_cdf_integral(double alpha, double theta, double x) {
  if (x == 0.0) return (1.0 - theta) / 2.0;
  if (x > 0.0) return cdf_positive(alpha, theta, x);
  return 1.0 - cdf_positive(alpha, -theta, -x);
}

}  // namespace detail

double stable_pdf(const StableParams& p, double x) {
  validate(p);
  if (is_degenerate(p)) {
    throw DomainError("stable_pdf: (alpha, theta) = (1, +-1) is degenerate");
  }
  if (p.alpha == 2.0) {
    return std::exp(-x * x / 4.0) / (2.0 * std::sqrt(pi));
  }
  if (p.alpha == 1.0) {
    const double scale = std::cos(pi * p.theta / 2.0);
    const double shift = std::sin(pi * p.theta / 2.0);
    const double z = x - shift;
    return scale / (pi * (z * z + scale * scale));
  }
  if (is_levy(p)) {
    const double y = p.theta > 0.0 ? x : -x;
    if (y <= 0.0) return 0.0;
    return std::exp(-1.0 / (4.0 * y) - 1.5 * std::log(y)) / (2.0 * std::sqrt(pi));
  }
  return detail::stable_pdf_integral(p.alpha, p.theta, x);
}

double stable_cdf(const StableParams& p, double x) {
  validate(p);
  if (is_degenerate(p)) {
    throw DomainError("stable_cdf: (alpha, theta) = (1, +-1) is degenerate");
  }
  if (p.alpha == 2.0) return normal_cdf(x / std::numbers::sqrt2);
  if (p.alpha == 1.0) {
    const double scale = std::cos(pi * p.theta / 2.0);
    const double shift = std::sin(pi * p.theta / 2.0);
    return 0.5 + std::atan((x - shift) / scale) / pi;
  }
  if (is_levy(p)) {
    if (p.theta > 0.0) {
      return x <= 0.0 ? 0.0 : std::erfc(1.0 / (2.0 * std::sqrt(x)));
    }
    return x >= 0.0 ? 1.0 : 1.0 - std::erfc(1.0 / (2.0 * std::sqrt(-x)));
  }
  return detail::stable_cdf_integral(p.alpha, p.theta, x);
}

double stable_abs_moment(const StableParams& p, double beta) {
  validate(p);
  if (!(beta > 0.0)) throw DomainError("stable_abs_moment: beta must be positive");
  if (p.theta == 0.0) {
    if (p.alpha == 2.0) {
      return std::pow(2.0, beta) * gamma_fn((beta + 1.0) / 2.0) / std::sqrt(pi);
    }
    if (beta >= p.alpha) {
      throw DomainError("stable_abs_moment: moments of order beta >= alpha do not exist");
    }
    // The last factor is Gamma(1 - beta/2); it reproduces the Cauchy moment
    // sec(pi beta / 2) at alpha = 1.
    return std::exp(beta * std::numbers::ln2 + log_gamma((beta + 1.0) / 2.0) +
                    log_gamma(1.0 - beta / p.alpha) - log_gamma(1.0 - beta / 2.0)) /
           std::sqrt(pi);
  }
  if (p.theta == 1.0 && p.alpha <= 1.0) {
    if (p.alpha == 1.0) return 1.0;
    if (beta >= p.alpha) {
      throw DomainError("stable_abs_moment: moments of order beta >= alpha do not exist");
    }
    return std::exp(log_gamma(1.0 - beta / p.alpha) - log_gamma(1.0 - beta));
  }
  throw DomainError("stable_abs_moment: only theta = 0 and theta = 1 are supported");
}

double sample_one_sided(double alpha, RandomState& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("sample_one_sided: alpha must lie in (0, 1]");
  }
  if (alpha == 1.0) return 1.0;
  const double u = pi * rng.uniform();
  const double w = standard_exponential(rng);
  const double log_s = std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
                       ((1.0 - alpha) / alpha) *
                           (std::log(std::sin((1.0 - alpha) * u)) - std::log(w));
  return std::exp(log_s);
}

double sample_symmetric(double alpha, RandomState& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("sample_symmetric: alpha must lie in (0, 2]");
  }
  const double v = pi * (rng.uniform() - 0.5);
  const double w = standard_exponential(rng);
  if (alpha == 1.0) return std::tan(v);
  const double c = std::cos(v);
  return std::sin(alpha * v) / std::pow(c, 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

double sample_stable(const StableParams& p, RandomState& rng) {
  validate(p);
  if (is_degenerate(p)) return p.theta;
  if (p.theta == 0.0) return sample_symmetric(p.alpha, rng);
  if (p.theta == 1.0 && p.alpha < 1.0) return sample_one_sided(p.alpha, rng);
  const double v = pi * (rng.uniform() - 0.5);
  const double w = standard_exponential(rng);
  if (p.alpha == 1.0) {
    return std::cos(pi * p.theta / 2.0) * std::tan(v) + std::sin(pi * p.theta / 2.0);
  }
  const double theta0 = pi * p.theta / 2.0;
  const double a = p.alpha;
  const double shifted = a * (v + theta0);
  return std::sin(shifted) / std::pow(std::cos(v), 1.0 / a) *
         std::pow(std::cos(v - shifted) / w, (1.0 - a) / a);
}

double sample_ratio(double alpha, RandomState& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("sample_ratio: alpha must lie in (0, 1)");
  }
  const double num = sample_one_sided(alpha, rng);
  const double den = sample_one_sided(alpha, rng);
  return num / den;
}

}  // namespace gnblab
