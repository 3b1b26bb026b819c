#include "gnblab/estimate.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>

#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include "gnblab/errors.hpp"
#include "gnblab/limits.hpp"
#include "gnblab/special.hpp"

namespace gnblab {

CountData::CountData(std::span<const std::int64_t> counts) {
  if (counts.empty()) throw DegenerateDataError("count data is empty");
  double sum = 0.0;
  for (auto c : counts) {
    if (c < 0) throw DomainError("count data must be nonnegative");
    ++histogram_[c];
    sum += static_cast<double>(c);
  }
  n_ = static_cast<std::int64_t>(counts.size());
  mean_ = sum / static_cast<double>(n_);
  double ss = 0.0;
  for (const auto& [v, f] : histogram_) {
    const double d = static_cast<double>(v) - mean_;
    ss += static_cast<double>(f) * d * d;
  }
  variance_ = n_ > 1 ? ss / static_cast<double>(n_ - 1) : 0.0;
}

std::vector<std::int64_t> CountData::values() const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(n_));
  for (const auto& [v, f] : histogram_) out.insert(out.end(), static_cast<std::size_t>(f), v);
  return out;
}

CountData read_counts(std::istream& in) {
  std::vector<std::int64_t> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r,");
    const std::string tok = line.substr(b, e - b + 1);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError("expected a nonnegative integer, got '" + tok + "'", lineno);
    }
    if (v < 0) throw ParseError("negative count " + tok, lineno);
    counts.push_back(v);
  }
  if (counts.empty()) throw ParseError("no counts in input", 0);
  return CountData(counts);
}

CountData read_counts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_counts(in);
}

std::string to_string(Family f) { return f == Family::NB ? "NB" : "GNB"; }

Family parse_family(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "nb") return Family::NB;
  if (s == "gnb") return Family::GNB;
  throw ConfigError("unknown family '" + name + "' (expected nb or gnb)");
}

double nb_log_likelihood(const CountData& data, const NBParams& p) {
  validate(p);
  double ll = 0.0;
  for (const auto& [k, f] : data.histogram()) ll += static_cast<double>(f) * nb_log_pmf(p, k);
  return ll;
}

double gnb_log_likelihood(const CountData& data, const GNBParams& p) {
  validate(p);
  double ll = 0.0;
  for (const auto& [k, f] : data.histogram()) ll += static_cast<double>(f) * gnb_log_pmf(p, k);
  return ll;
}

double l1_distance(const CountData& data, const PmfTable& pmf) {
  if (pmf.support_max < data.max_count()) {
    throw DomainError("l1_distance: pmf table ends at " + std::to_string(pmf.support_max) +
                      " but the data reach " + std::to_string(data.max_count()));
  }
  const double n = static_cast<double>(data.n());
  const auto& h = data.histogram();
  double d = 0.0;
  for (std::int64_t k = 0; k <= pmf.support_max; ++k) {
    const auto it = h.find(k);
    const double f = it == h.end() ? 0.0 : static_cast<double>(it->second) / n;
    d += std::abs(f - pmf.probs[static_cast<std::size_t>(k)]);
  }
  return std::clamp(d + pmf.tail_mass, 0.0, 2.0);
}

PmfTable fitted_table(const FitResult& fit, std::int64_t k_max) {
  if (fit.family == Family::NB) {
    return nb_pmf_table({fit.params.at("r"), fit.params.at("p")}, k_max);
  }
  return gnb_pmf_table({fit.params.at("r"), fit.params.at("alpha"), fit.params.at("mu")}, k_max);
}

namespace {

// Search range for log r in the NB profile likelihood.
constexpr double log_r_min = -12.0;
constexpr double log_r_max = 14.0;

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
struct SimplexResult {
  Point<D> x{};
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead with the standard coefficients. The best vertex only ever
// improves, so the result is never worse than the start.
template <std::size_t D, class F>
SimplexResult<D> nelder_mead(F&& f, const Point<D>& start, double step, int max_iter, double tol) {
  std::array<Point<D>, D + 1> v;
  std::array<double, D + 1> fv;
  v[0] = start;
  for (std::size_t i = 0; i < D; ++i) {
    v[i + 1] = start;
    v[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= D; ++i) fv[i] = f(v[i]);

  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 0; i <= D; ++i) {
      for (std::size_t j = i + 1; j <= D; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < D; ++c) s += (v[i][c] - v[j][c]) * (v[i][c] - v[j][c]);
        d = std::max(d, std::sqrt(s));
      }
    }
    return d;
  };
  auto along = [](const Point<D>& a, const Point<D>& b, double t) {
    Point<D> out;
    for (std::size_t c = 0; c < D; ++c) out[c] = a[c] + t * (b[c] - a[c]);
    return out;
  };

  SimplexResult<D> res;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    std::array<std::size_t, D + 1> order;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    {
      auto v2 = v;
      auto f2 = fv;
      for (std::size_t i = 0; i <= D; ++i) {
        v[i] = v2[order[i]];
        fv[i] = f2[order[i]];
      }
    }
    if (diameter() < tol) {
      res.converged = true;
      break;
    }
    Point<D> centroid{};
    for (std::size_t i = 0; i < D; ++i) {
      for (std::size_t c = 0; c < D; ++c) centroid[c] += v[i][c] / static_cast<double>(D);
    }
    const Point<D> refl = along(centroid, v[D], -1.0);
    const double fr = f(refl);
    if (fr < fv[0]) {
      const Point<D> exp = along(centroid, v[D], -2.0);
      const double fe = f(exp);
      if (fe < fr) {
        v[D] = exp;
        fv[D] = fe;
      } else {
        v[D] = refl;
        fv[D] = fr;
      }
      continue;
    }
    if (fr < fv[D - 1]) {
      v[D] = refl;
      fv[D] = fr;
      continue;
    }
    const bool outside = fr < fv[D];
    const Point<D> con = outside ? along(centroid, refl, 0.5) : along(centroid, v[D], 0.5);
    const double fc = f(con);
    if (fc < (outside ? fr : fv[D])) {
      v[D] = con;
      fv[D] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= D; ++i) {
      v[i] = along(v[0], v[i], 0.5);
      fv[i] = f(v[i]);
    }
  }
  const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
  res.x = v[static_cast<std::size_t>(best)];
  res.value = fv[static_cast<std::size_t>(best)];
  return res;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double t = pos - static_cast<double>(i);
  return i + 1 < v.size() ? v[i] * (1.0 - t) + v[i + 1] * t : v[i];
}

}  // namespace

FitResult fit_nb_mle(const CountData& data) {
  if (data.n() < 2) throw DegenerateDataError("fit_nb_mle: needs at least two observations");
  if (!(data.variance() > 0.0)) {
    throw DegenerateDataError("fit_nb_mle: all counts are equal");
  }
  const double m = data.mean();
  auto negll = [&](double log_r) {
    const double r = std::exp(log_r);
    return -nb_log_likelihood(data, {r, r / (r + m)});
  };
  boost::uintmax_t iters = 500;
  const auto [log_r, value] =
      boost::math::tools::brent_find_minima(negll, log_r_min, log_r_max, 40, iters);
  FitResult fit;
  fit.family = Family::NB;
  const double r = std::exp(log_r);
  fit.params = {{"r", r}, {"p", r / (r + m)}};
  fit.log_likelihood = -value;
  fit.iterations = static_cast<int>(iters);
  fit.converged = iters < 500 && log_r < log_r_max - 1e-3 && log_r > log_r_min + 1e-3;
  fit.l1_distance = l1_distance(data, fitted_table(fit, data.max_count()));
  return fit;
}

FitResult fit_gnb_mle(const CountData& data, const GnbFitOptions& options) {
  if (data.n() < 3) throw DegenerateDataError("fit_gnb_mle: needs at least three observations");
  if (!(data.variance() > 0.0)) {
    throw DegenerateDataError("fit_gnb_mle: all counts are equal");
  }
  GNBParams init;
  if (options.init) {
    init = *options.init;
    validate(init);
  } else {
    const auto nb = fit_nb_mle(data);
    const double p = nb.params.at("p");
    init = {nb.params.at("r"), options.negative_alpha ? -1.0 : 1.0, p / (1.0 - p)};
  }
  if ((init.alpha < 0.0) != options.negative_alpha) {
    throw DomainError("fit_gnb_mle: initial alpha is on the wrong branch");
  }
  const double sign = options.negative_alpha ? -1.0 : 1.0;
  auto unpack = [&](const Point<3>& x) {
    return GNBParams{std::exp(x[0]), sign * std::exp(x[1]), std::exp(x[2])};
  };
  auto negll = [&](const Point<3>& x) {
    for (double c : x) {
      if (!(std::abs(c) < 30.0)) return std::numeric_limits<double>::infinity();
    }
    const double ll = gnb_log_likelihood(data, unpack(x));
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };
  const Point<3> start{std::log(init.r), std::log(std::abs(init.alpha)), std::log(init.mu)};
  const auto res = nelder_mead<3>(negll, start, 0.1, options.max_iterations, options.tolerance);

  FitResult fit;
  fit.family = Family::GNB;
  const auto best = unpack(res.x);
  fit.params = {{"r", best.r}, {"alpha", best.alpha}, {"mu", best.mu}};
  fit.log_likelihood = -res.value;
  fit.iterations = res.iterations;
  fit.converged = res.converged;
  fit.l1_distance = l1_distance(data, fitted_table(fit, data.max_count()));
  return fit;
}

BootstrapResult bootstrap_fit(const CountData& data, Family family, int replicates,
                              std::uint64_t seed, double confidence) {
  if (replicates < 2) throw DomainError("bootstrap_fit: needs at least two replicates");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("bootstrap_fit: confidence must lie in (0, 1)");
  }
  const auto values = data.values();
  const double n = static_cast<double>(values.size());
  BootstrapResult out;
  std::vector<std::int64_t> resample(values.size());
  for (int b = 0; b < replicates; ++b) {
    RandomState rng(seed, static_cast<std::uint64_t>(b));
    for (auto& v : resample) {
      const auto i = static_cast<std::size_t>(rng.uniform() * n);
      v = values[std::min(i, values.size() - 1)];
    }
    const CountData boot(resample);
    out.replicates.push_back(family == Family::NB ? fit_nb_mle(boot) : fit_gnb_mle(boot));
  }
  for (const auto& [name, unused] : out.replicates.front().params) {
    std::vector<double> col;
    for (const auto& f : out.replicates) col.push_back(f.params.at(name));
    out.intervals[name] = {quantile(col, 0.5 * (1.0 - confidence)),
                           quantile(col, 0.5 * (1.0 + confidence))};
  }
  return out;
}

double hill_tail_index(std::span<const double> samples, std::size_t k) {
  if (samples.size() < 10) throw DomainError("hill_tail_index: needs at least 10 samples");
  if (k == 0) k = static_cast<std::size_t>(std::sqrt(static_cast<double>(samples.size())));
  if (k >= samples.size()) throw DomainError("hill_tail_index: k must be below the sample size");
  std::vector<double> a(samples.size());
  std::transform(samples.begin(), samples.end(), a.begin(), [](double x) { return std::abs(x); });
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end(),
                   std::greater<>());
  const double threshold = a[k];
  if (!(threshold > 0.0)) throw DomainError("hill_tail_index: too many zeros in the sample");
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(a[i] / threshold);
  return static_cast<double>(k) / s;
}

namespace {

double family_alpha_cap(HeavyFamily family) { return family == HeavyFamily::A ? 1.0 : 2.0; }

double family_log_moment(HeavyFamily family, const GammaMixedStableParams& p, double beta) {
  return std::log(family == HeavyFamily::A ? a_moment(p, beta) : h_abs_moment(p, beta));
}

std::vector<double> log_empirical_moments(std::span<const double> samples,
                                          std::span<const double> grid) {
  std::vector<double> out;
  for (double beta : grid) {
    double s = 0.0;
    for (double x : samples) s += std::pow(std::abs(x), beta);
    out.push_back(std::log(s / static_cast<double>(samples.size())));
  }
  return out;
}

double residual_from(std::span<const double> logm, HeavyFamily family,
                     std::span<const double> grid, const GammaMixedStableParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] < p.alpha)) return std::numeric_limits<double>::infinity();
    const double d = logm[i] - family_log_moment(family, p, grid[i]);
    s += d * d;
  }
  return s;
}

}  // namespace

double heavy_moment_residual(std::span<const double> samples, HeavyFamily family,
                             std::span<const double> beta_grid, double r, double alpha,
                             double alpha_prime) {
  const GammaMixedStableParams p{r, alpha, alpha_prime};
  validate(p);
  return residual_from(log_empirical_moments(samples, beta_grid), family, beta_grid, p);
}

HeavyFit fit_heavy_moments(std::span<const double> samples, HeavyFamily family,
                           std::span<const double> beta_grid) {
  std::vector<double> grid(beta_grid.begin(), beta_grid.end());
  std::sort(grid.begin(), grid.end());
  if (grid.size() < 3) {
    throw DomainError("fit_heavy_moments: needs at least three beta values for three parameters");
  }
  if (!(grid.front() > 0.0)) throw DomainError("fit_heavy_moments: beta values must be positive");
  const double cap = family_alpha_cap(family);
  HeavyFit fit;
  fit.hill_alpha = hill_tail_index(samples);
  if (grid.back() >= std::min(fit.hill_alpha, cap)) {
    throw DomainError("fit_heavy_moments: infeasible grid, beta = " + std::to_string(grid.back()) +
                      " is not below the tail index estimate " +
                      std::to_string(std::min(fit.hill_alpha, cap)));
  }
  for (;;) {
    const auto logm = log_empirical_moments(samples, grid);
    // alpha = cap / (1 + e^{-v}) keeps alpha inside the family range.
    auto unpack = [&](const Point<3>& x) {
      return GammaMixedStableParams{std::exp(x[0]), cap / (1.0 + std::exp(-x[1])),
                                    std::exp(x[2])};
    };
    auto objective = [&](const Point<3>& x) {
      for (double c : x) {
        if (!(std::abs(c) < 30.0)) return std::numeric_limits<double>::infinity();
      }
      return residual_from(logm, family, grid, unpack(x));
    };
    const double a0 = std::clamp(fit.hill_alpha, 0.5 * (grid.back() + cap), 0.95 * cap);
    const Point<3> start{0.0, -std::log(cap / std::min(a0, 0.99 * cap) - 1.0), 0.0};
    const auto res = nelder_mead<3>(objective, start, 0.5, 5000, 1e-9);
    const auto p = unpack(res.x);
    fit.r = p.r;
    fit.alpha = p.alpha;
    fit.alpha_prime = p.alpha_prime;
    fit.residual = res.value;
    fit.iterations += res.iterations;
    fit.converged = res.converged;
    fit.beta_grid = grid;
    // Post hoc feasibility: every beta must stay below the fitted alpha.
    const auto keep = std::partition_point(grid.begin(), grid.end(),
                                           [&](double b) { return b < fit.alpha; });
    if (keep == grid.end()) break;
    grid.erase(keep, grid.end());
    if (grid.size() < 3) {
      throw DomainError("fit_heavy_moments: infeasible grid, fitted alpha " +
                        std::to_string(fit.alpha) + " leaves fewer than three beta values");
    }
  }
  return fit;
}

std::string to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["family"] = to_string(fit.family);
  j["params"] = fit.params;
  j["log_likelihood"] = fit.log_likelihood;
  j["l1_distance"] = fit.l1_distance;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j.dump();
}

}  // namespace gnblab
