#pragma once

// Maximum likelihood for the NB and GNB count models, fractional-moment
// fitting of the heavy-tailed limit laws, and the L1 fit metric.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnblab/distributions.hpp"
#include "gnblab/samplers.hpp"

namespace gnblab {

/// Observed counts, kept as a histogram value -> frequency.
class CountData {
 public:
  /// Throws DegenerateDataError when empty, DomainError on a negative count.
  explicit CountData(std::span<const std::int64_t> counts);

  std::int64_t n() const noexcept { return n_; }
  std::int64_t max_count() const noexcept { return histogram_.rbegin()->first; }
  const std::map<std::int64_t, std::int64_t>& histogram() const noexcept { return histogram_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 when n = 1.
  double variance() const noexcept { return variance_; }
  /// Values expanded back to one entry per observation, in sorted order.
  std::vector<std::int64_t> values() const;

 private:
  std::map<std::int64_t, std::int64_t> histogram_;
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

/// One nonnegative integer per line; blank lines and `#` comments skipped.
/// Throws ParseError with the 1-based line of the first bad entry, and for
/// input without any counts.
CountData read_counts(std::istream& in);
CountData read_counts_file(const std::string& path);

enum class Family { NB, GNB };
std::string to_string(Family f);
/// Accepts "nb" and "gnb" (any case).
Family parse_family(const std::string& name);

struct FitResult {
  Family family = Family::NB;
  /// NB: r, p. GNB: r, alpha, mu.
  LawParams params;
  double log_likelihood = 0.0;
  double l1_distance = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Profile likelihood in r with p = r / (r + mean), maximized by Brent's
/// method over log r. Needs n >= 2 and nonzero variance. When the data are
/// not overdispersed the supremum sits at r -> inf; the result is then the
/// upper end of the search range with converged = false.
FitResult fit_nb_mle(const CountData& data);

struct GnbFitOptions {
  /// Starting point; default is the NB fit mapped to alpha = 1.
  std::optional<GNBParams> init;
  /// Search the alpha < 0 branch instead of alpha > 0.
  bool negative_alpha = false;
  int max_iterations = 2000;
  /// Stop when the simplex diameter in log coordinates drops below this.
  double tolerance = 1e-6;
};

/// Nelder-Mead over (log r, log |alpha|, log mu). Never returns a point
/// worse than its start, so the NB warm start gives the nesting property.
/// Runs out of iterations with converged = false and the best point found.
FitResult fit_gnb_mle(const CountData& data, const GnbFitOptions& options = {});

double nb_log_likelihood(const CountData& data, const NBParams& p);
double gnb_log_likelihood(const CountData& data, const GNBParams& p);

/// sum_k |f_k - p_k| over k <= support_max plus pmf.tail_mass, where f is
/// the empirical frequency. Throws DomainError when the table stops short
/// of the largest observed count.
double l1_distance(const CountData& data, const PmfTable& pmf);

/// Fitted PMF on 0..k_max.
PmfTable fitted_table(const FitResult& fit, std::int64_t k_max);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

struct BootstrapResult {
  std::vector<FitResult> replicates;
  /// Percentile intervals per parameter name.
  std::map<std::string, Interval> intervals;
};

/// Nonparametric bootstrap: `replicates` resamples of size n drawn with
/// replacement from RandomState(seed, b), each refit with the same family.
BootstrapResult bootstrap_fit(const CountData& data, Family family, int replicates,
                              std::uint64_t seed, double confidence = 0.95);

enum class HeavyFamily { A, H };

struct HeavyFit {
  double r = 0.0;
  double alpha = 0.0;
  double alpha_prime = 0.0;
  /// Sum of squared log-moment residuals at the estimate.
  double residual = 0.0;
  /// Grid actually used (entries at or above the fitted alpha are dropped).
  std::vector<double> beta_grid;
  double hill_alpha = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Hill estimate of the tail index of |x| from the top k order statistics;
/// k defaults to floor(sqrt(n)).
double hill_tail_index(std::span<const double> samples, std::size_t k = 0);

/// Least-squares match of log empirical E|X|^beta to the closed-form
/// moments (a_moment for A, h_abs_moment for H), alpha' > 0. Throws
/// DomainError when the grid has fewer than three points, or when some
/// beta reaches the tail index: either the Hill estimate up front or the
/// fitted alpha after a refit on the remaining grid.
HeavyFit fit_heavy_moments(std::span<const double> samples, HeavyFamily family,
                           std::span<const double> beta_grid);

/// The objective minimized by fit_heavy_moments at a given point.
double heavy_moment_residual(std::span<const double> samples, HeavyFamily family,
                             std::span<const double> beta_grid, double r, double alpha,
                             double alpha_prime);

/// {"schema":1,"family":..,"params":{..},"log_likelihood":..,...}
std::string to_json(const FitResult& fit);

}  // namespace gnblab
