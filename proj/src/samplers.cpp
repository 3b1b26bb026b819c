#include "gnblab/samplers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>

#include "gnblab/errors.hpp"
#include "gnblab/special.hpp"
#include "gnblab/stable.hpp"
#include "gnblab/version.hpp"

namespace gnblab {
namespace {

constexpr double count_cap = 4.0e18;  // keeps counts representable in int64

std::int64_t to_count(double k) {
  return static_cast<std::int64_t>(std::min(k, count_cap));
}

// Marsaglia-Tsang for shape >= 1, returned on the log scale.
double log_gamma_mt(double shape, RandomState& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

std::int64_t poisson_inversion(double rate, RandomState& rng) {
  for (;;) {
    double p = std::exp(-rate);
    double cdf = p;
    const double u = rng.uniform();
    std::int64_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= rate / static_cast<double>(k);
      cdf += p;
    }
    if (k < 1000) return k;
  }
}

// Hoermann's transformed rejection with squeeze (PTRS), rate >= 10.
std::int64_t poisson_ptrs(double rate, RandomState& rng) {
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -rate + k * loglam - log_factorial(k)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

std::int64_t binomial_inversion(std::int64_t m, double p, RandomState& rng) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = (static_cast<double>(m) + 1.0) * s;
  for (;;) {
    double r = std::pow(q, static_cast<double>(m));
    double u = rng.uniform();
    std::int64_t k = 0;
    while (u > r) {
      u -= r;
      ++k;
      if (k > m) break;
      r *= a / static_cast<double>(k) - s;
    }
    if (k <= m) return k;
  }
}

// Hoermann's BTRS, m p (1 - p) large enough; requires p <= 1/2.
std::int64_t binomial_btrs(std::int64_t m, double p, RandomState& rng) {
  const double n = static_cast<double>(m);
  const double q = 1.0 - p;
  const double spq = std::sqrt(n * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = n * p + 0.5;
  const double vr = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const double mode = std::floor((n + 1.0) * p);
  const double h = log_factorial(mode) + log_factorial(n - mode);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > n) continue;
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - log_factorial(k) - log_factorial(n - k) + (k - mode) * lpq) {
      return static_cast<std::int64_t>(k);
    }
  }
}

std::int64_t binomial_small_p(std::int64_t m, double p, RandomState& rng) {
  if (p == 0.0) return 0;
  if (static_cast<double>(m) * p < 10.0) return binomial_inversion(m, p, rng);
  return binomial_btrs(m, p, rng);
}

// log X for X = S_{alpha,1} Z_{r,mu}^{1/alpha}, the odds Y / (1 - Y).
double sample_log_odds(const MixedGeomParams& p, RandomState& rng) {
  const double s = p.alpha == 1.0 ? 1.0 : sample_one_sided(p.alpha, rng);
  return std::log(s) + std::log(sample_gleser_Z(p.r, p.mu, rng)) / p.alpha;
}

// Geometric count with success probability 1 / (1 + e^{-log_odds}).
std::int64_t geometric_from_log_odds(double log_odds, RandomState& rng) {
  // log(1 - Y) = -log(1 + X)
  const double log_fail = log_odds > 30.0 ? -log_odds - std::exp(-log_odds)
                                          : -std::log1p(std::exp(log_odds));
  if (log_fail == 0.0) return to_count(count_cap);
  return to_count(std::floor(std::log(rng.uniform()) / log_fail));
}

}  // namespace

double sample_log_gamma(double r, RandomState& rng) {
  if (!(r > 0.0)) throw DomainError("sample_gamma: shape must be positive");
  if (r >= 1.0) return log_gamma_mt(r, rng);
  // G_r = G_{r+1} U^{1/r}
  const double base = log_gamma_mt(r + 1.0, rng);
  return base + std::log(rng.uniform()) / r;
}

double sample_gamma(double r, double lambda, RandomState& rng) {
  if (!(lambda > 0.0)) throw DomainError("sample_gamma: rate must be positive");
  return std::exp(sample_log_gamma(r, rng) - std::log(lambda));
}

std::int64_t sample_poisson(double rate, RandomState& rng) {
  if (!(rate >= 0.0)) throw DomainError("sample_poisson: rate must be nonnegative");
  if (rate == 0.0) return 0;
  if (rate < 10.0) return poisson_inversion(rate, rng);
  // Beyond 1e12 the rounded normal law is within 1e-6 of Poisson in
  // Kolmogorov distance.
  if (rate > 1e12) {
    return to_count(std::max(0.0, std::round(rate + std::sqrt(rate) * standard_normal(rng))));
  }
  return poisson_ptrs(rate, rng);
}

std::int64_t sample_binomial(std::int64_t m, double p, RandomState& rng) {
  if (m < 0) throw DomainError("sample_binomial: m must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sample_binomial: p must lie in [0, 1]");
  if (p > 0.5) return m - binomial_small_p(m, 1.0 - p, rng);
  return binomial_small_p(m, p, rng);
}

std::int64_t sample_geometric(double p, RandomState& rng) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("sample_geometric: p must lie in (0, 1]");
  if (p == 1.0) return 0;
  return to_count(std::floor(std::log(rng.uniform()) / std::log1p(-p)));
}

double sample_gg(const GGParams& p, RandomState& rng) {
  validate(p);
  return std::exp((sample_log_gamma(p.r, rng) - std::log(p.lambda)) / p.alpha);
}

double sample_weibull(double alpha, RandomState& rng) {
  if (!(alpha > 0.0)) throw DomainError("sample_weibull: alpha must be positive");
  return std::exp(std::log(standard_exponential(rng)) / alpha);
}

double sample_gleser_Z(double r, double mu, RandomState& rng) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("sample_gleser_Z: r must lie in (0, 1]");
  if (!(mu > 0.0)) throw DomainError("sample_gleser_Z: mu must be positive");
  if (r == 1.0) return mu;
  const double lg_r = sample_log_gamma(r, rng);
  const double lg_rest = sample_log_gamma(1.0 - r, rng);
  return mu * (1.0 + std::exp(lg_rest - lg_r));
}

double sample_snedecor_fisher(double r, RandomState& rng) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("sample_snedecor_fisher: r must lie in (0, 1)");
  // P(Q <= x) = I_t(1 - r, r) with t = (1 - r) x / ((1 - r) x + r).
  const double t = beta_inc_inverse(1.0 - r, r, rng.uniform());
  return r * t / ((1.0 - r) * (1.0 - t));
}

double sample_success_prob(const MixedGeomParams& p, RandomState& rng) {
  validate(p);
  const double y = 1.0 / (1.0 + std::exp(-sample_log_odds(p, rng)));
  return std::clamp(y, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

std::int64_t sample_gnb(const GNBParams& p, RandomState& rng) {
  validate(p);
  return sample_poisson(sample_gg({p.r, p.alpha, p.mu}, rng), rng);
}

std::int64_t sample_nb(const NBParams& p, RandomState& rng) {
  validate(p);
  return sample_poisson(sample_gamma(p.r, p.p / (1.0 - p.p), rng), rng);
}

std::int64_t sample_mixed_geometric(const MixedGeomParams& p, RandomState& rng) {
  validate(p);
  return geometric_from_log_odds(sample_log_odds(p, rng), rng);
}

double sample_mittag_leffler(double alpha, RandomState& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("sample_mittag_leffler: alpha must lie in (0, 1]");
  }
  const double w = standard_exponential(rng);
  if (alpha == 1.0) return w;
  return w * sample_ratio(alpha, rng);
}

double sample_linnik(double alpha, RandomState& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("sample_linnik: alpha must lie in (0, 2]");
  const double x = standard_normal(rng);
  return x * std::sqrt(2.0 * sample_mittag_leffler(alpha / 2.0, rng));
}

std::int64_t sample_mixed_binomial(std::int64_t m, const MixedGeomParams& y_law,
                                   RandomState& rng) {
  if (m < 1) throw DomainError("sample_mixed_binomial: m must be positive");
  validate(y_law);
  const double log_odds = sample_log_odds(y_law, rng);
  // Draw from whichever of Y, 1 - Y is below 1/2 so it is never rounded.
  if (log_odds > 0.0) return m - binomial_small_p(m, 1.0 / (1.0 + std::exp(log_odds)), rng);
  return binomial_small_p(m, 1.0 / (1.0 + std::exp(-log_odds)), rng);
}

double sample_random_sum(const RandomSumSpec& spec, std::int64_t n, RandomState& rng) {
  if (n < 1) throw DomainError("sample_random_sum: n must be positive");
  const double nn = static_cast<double>(n);
  const GNBParams index{spec.r, spec.alpha_prime, std::pow(nn, -spec.alpha_prime)};
  const double count = static_cast<double>(sample_gnb(index, rng));
  switch (spec.kind) {
    case SummandKind::Exponential:
      return count == 0.0 ? 0.0 : sample_gamma(count, 1.0, rng) / nn;
    case SummandKind::OneSidedStable: {
      const double a = spec.summand_alpha;
      if (!(a > 0.0 && a < 1.0)) throw DomainError("sample_random_sum: alpha must lie in (0, 1)");
      if (count == 0.0) return 0.0;
      return std::pow(count / nn, 1.0 / a) * sample_one_sided(a, rng);
    }
    case SummandKind::SymmetricStable: {
      const double a = spec.summand_alpha;
      if (!(a > 0.0 && a < 2.0)) throw DomainError("sample_random_sum: alpha must lie in (0, 2)");
      if (count == 0.0) return 0.0;
      return std::pow(count / nn, 1.0 / a) * sample_symmetric(a, rng);
    }
    case SummandKind::CenteredExponential:
      if (count == 0.0) return 0.0;
      return (sample_gamma(count, 1.0, rng) - count) / std::sqrt(nn);
  }
  throw DomainError("sample_random_sum: unsupported summand family");
}

namespace {

double need(const LawParams& params, const std::string& law, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("law '" + law + "' requires parameter '" + key + "'");
  return it->second;
}

using Drawer = std::function<double(RandomState&)>;

struct LawEntry {
  LawInfo info;
  std::function<Drawer(const LawParams&)> bind;
};

const std::vector<LawEntry>& entries() {
  static const std::vector<LawEntry> table = [] {
    std::vector<LawEntry> t;
    auto add = [&](std::string name, std::vector<std::string> keys, bool integer,
                   std::function<Drawer(const LawParams&)> bind) {
      t.push_back({{std::move(name), std::move(keys), integer}, std::move(bind)});
    };
    add("gamma", {"r", "lambda"}, false, [](const LawParams& q) -> Drawer {
      const double r = need(q, "gamma", "r"), l = need(q, "gamma", "lambda");
      return [=](RandomState& g) { return sample_gamma(r, l, g); };
    });
    add("gg", {"r", "alpha", "mu"}, false, [](const LawParams& q) -> Drawer {
      const GGParams p{need(q, "gg", "r"), need(q, "gg", "alpha"), need(q, "gg", "mu")};
      validate(p);
      return [=](RandomState& g) { return sample_gg(p, g); };
    });
    add("weibull", {"alpha"}, false, [](const LawParams& q) -> Drawer {
      const double a = need(q, "weibull", "alpha");
      return [=](RandomState& g) { return sample_weibull(a, g); };
    });
    add("stable", {"alpha", "theta"}, false, [](const LawParams& q) -> Drawer {
      const StableParams p{need(q, "stable", "alpha"), need(q, "stable", "theta")};
      validate(p);
      return [=](RandomState& g) { return sample_stable(p, g); };
    });
    add("one_sided_stable", {"alpha"}, false, [](const LawParams& q) -> Drawer {
      const double a = need(q, "one_sided_stable", "alpha");
      return [=](RandomState& g) { return sample_one_sided(a, g); };
    });
    add("symmetric_stable", {"alpha"}, false, [](const LawParams& q) -> Drawer {
      const double a = need(q, "symmetric_stable", "alpha");
      return [=](RandomState& g) { return sample_symmetric(a, g); };
    });
    add("stable_ratio", {"alpha"}, false, [](const LawParams& q) -> Drawer {
      const double a = need(q, "stable_ratio", "alpha");
      return [=](RandomState& g) { return sample_ratio(a, g); };
    });
    add("gleser_z", {"r", "mu"}, false, [](const LawParams& q) -> Drawer {
      const double r = need(q, "gleser_z", "r"), mu = need(q, "gleser_z", "mu");
      return [=](RandomState& g) { return sample_gleser_Z(r, mu, g); };
    });
    add("snedecor_fisher", {"r"}, false, [](const LawParams& q) -> Drawer {
      const double r = need(q, "snedecor_fisher", "r");
      return [=](RandomState& g) { return sample_snedecor_fisher(r, g); };
    });
    add("success_prob", {"r", "alpha", "mu"}, false, [](const LawParams& q) -> Drawer {
      const MixedGeomParams p{need(q, "success_prob", "r"), need(q, "success_prob", "alpha"),
                              need(q, "success_prob", "mu")};
      validate(p);
      return [=](RandomState& g) { return sample_success_prob(p, g); };
    });
    add("gnb", {"r", "alpha", "mu"}, true, [](const LawParams& q) -> Drawer {
      const GNBParams p{need(q, "gnb", "r"), need(q, "gnb", "alpha"), need(q, "gnb", "mu")};
      validate(p);
      return [=](RandomState& g) { return static_cast<double>(sample_gnb(p, g)); };
    });
    add("nb", {"r", "p"}, true, [](const LawParams& q) -> Drawer {
      const NBParams p{need(q, "nb", "r"), need(q, "nb", "p")};
      validate(p);
      return [=](RandomState& g) { return static_cast<double>(sample_nb(p, g)); };
    });
    add("poisson", {"lambda"}, true, [](const LawParams& q) -> Drawer {
      const double l = need(q, "poisson", "lambda");
      return [=](RandomState& g) { return static_cast<double>(sample_poisson(l, g)); };
    });
    add("mixed_geometric", {"r", "alpha", "mu"}, true, [](const LawParams& q) -> Drawer {
      const MixedGeomParams p{need(q, "mixed_geometric", "r"),
                              need(q, "mixed_geometric", "alpha"),
                              need(q, "mixed_geometric", "mu")};
      validate(p);
      return [=](RandomState& g) { return static_cast<double>(sample_mixed_geometric(p, g)); };
    });
    add("mittag_leffler", {"alpha"}, false, [](const LawParams& q) -> Drawer {
      const double a = need(q, "mittag_leffler", "alpha");
      return [=](RandomState& g) { return sample_mittag_leffler(a, g); };
    });
    add("linnik", {"alpha"}, false, [](const LawParams& q) -> Drawer {
      const double a = need(q, "linnik", "alpha");
      return [=](RandomState& g) { return sample_linnik(a, g); };
    });
    add("mixed_binomial", {"m", "r", "alpha", "mu"}, true, [](const LawParams& q) -> Drawer {
      const auto m = static_cast<std::int64_t>(need(q, "mixed_binomial", "m"));
      const MixedGeomParams p{need(q, "mixed_binomial", "r"), need(q, "mixed_binomial", "alpha"),
                              need(q, "mixed_binomial", "mu")};
      validate(p);
      return [=](RandomState& g) { return static_cast<double>(sample_mixed_binomial(m, p, g)); };
    });
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<LawInfo>& law_registry() {
  static const std::vector<LawInfo> infos = [] {
    std::vector<LawInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

SampleBatch draw_batch(const std::string& law, const LawParams& params, std::size_t count,
                       std::uint64_t seed) {
  if (count == 0) throw DomainError("draw_batch: at least one draw must be requested");
  const auto& table = entries();
  auto it = std::find_if(table.begin(), table.end(),
                         [&](const LawEntry& e) { return e.info.name == law; });
  if (it == table.end()) {
    std::string names;
    for (const auto& e : table) names += (names.empty() ? "" : ", ") + e.info.name;
    throw ConfigError("unknown law '" + law + "'; registered laws: " + names);
  }
  LawParams used;
  for (const auto& key : it->info.params) used[key] = need(params, law, key);
  const Drawer draw = it->bind(used);
  SampleBatch batch{law, used, seed, {}};
  batch.values.reserve(count);
  RandomState rng(seed);
  for (std::size_t i = 0; i < count; ++i) batch.values.push_back(draw(rng));
  return batch;
}

std::string format_params(const LawParams& params) {
  std::string out;
  char buf[64];
  for (const auto& [key, value] : params) {
    // Shortest representation that reads back to the same double.
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    out += (out.empty() ? "" : ";") + key + "=" + std::string(buf, res.ptr);
  }
  return out;
}

void write_csv(std::ostream& os, const SampleBatch& batch) {
  os << metadata_line("sample", batch.law, format_params(batch.params), batch.seed) << '\n';
  char buf[64];
  for (double v : batch.values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << '\n';
  }
}

}  // namespace gnblab
