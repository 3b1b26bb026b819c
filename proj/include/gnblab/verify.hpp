#pragma once

// Monte Carlo checks of distributional identities and limit theorems.
//
// An identity entry draws one baseline sample and compares it with each of
// its representations; a convergence entry compares finite-n draws with the
// limit law along a grid. Every draw comes from a RandomState addressed by
// (suite seed, hash of entry/point/path), so reports do not depend on the
// order or number of workers.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gnblab/random.hpp"
#include "gnblab/samplers.hpp"

namespace gnblab {

enum class TestKind { KS2, KS1, CHI2 };
std::string to_string(TestKind kind);

using Drawer = std::function<double(RandomState&)>;

struct IdentityPaths {
  std::string baseline_name;
  Drawer baseline;
  std::vector<std::pair<std::string, Drawer>> representations;
  /// For KS1: the CDF the baseline sample is tested against.
  std::function<double(double)> cdf;
};

struct IdentitySpec {
  std::string id;
  /// The identity in law being checked, written out.
  std::string statement;
  TestKind test = TestKind::KS2;
  std::vector<LawParams> default_points;
  std::function<IdentityPaths(const LawParams&)> bind;
  /// Shipped as a power check; a correct implementation fails it.
  bool negative_control = false;
};

struct IdentityReport {
  std::string id;
  std::string statement;
  std::string comparison;
  LawParams params;
  TestKind test = TestKind::KS2;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  double threshold = 0.0;
  bool passed = false;
  bool negative_control = false;
};

const std::vector<IdentitySpec>& identity_registry();
const IdentitySpec& find_identity(const std::string& id);

/// Runs every comparison of `spec` at one parameter point. `level` is the
/// per-comparison significance (already Bonferroni-adjusted by run_suite).
std::vector<IdentityReport> run_identity(const IdentitySpec& spec, const LawParams& point,
                                         std::int64_t n, std::uint64_t seed, double level);

struct ConvergenceSpec {
  std::string id;
  std::string statement;
  /// One of: GNB-scaling, random-sum, mixed-binomial, random-size-statistic.
  std::string scheme;
  /// Grid of the scheme parameter (mu, n or m), ordered toward the limit.
  std::vector<double> grid;
  LawParams params;
  TestKind test = TestKind::KS2;
  /// Draw of the scaled finite-stage quantity at a grid value.
  std::function<double(double grid_value, RandomState&)> draw_finite;
  /// Limit law: a sampler for KS2/CHI2, a CDF for KS1.
  Drawer draw_limit;
  std::function<double(double)> limit_cdf;
  std::string note;
};

struct ConvergenceRow {
  double grid_value = 0.0;
  double ks_distance = 0.0;
  double std_error = 0.0;
};

struct ConvergenceReport {
  std::string id;
  std::string statement;
  std::string scheme;
  LawParams params;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<ConvergenceRow> rows;
  bool monotone = false;
  double final_threshold = 0.02;
  /// Chi-square homogeneity p-value at the last grid point (integer laws).
  std::optional<double> final_p_value;
  bool passed = false;
  std::string note;
};

const std::vector<ConvergenceSpec>& convergence_registry();
const ConvergenceSpec& find_convergence(const std::string& id);

/// Monte Carlo standard error of a KS distance at effective size n_eff,
/// from the standard deviation of the Kolmogorov law.
double ks_std_error(double n_eff);

/// Throws ConfigError for a grid with fewer than two points.
ConvergenceReport run_convergence(const ConvergenceSpec& spec, std::int64_t n_per_point,
                                  std::uint64_t seed, double level = 0.01);

struct SuiteConfig {
  std::uint64_t seed = 20240601;
  std::int64_t n = 100000;
  std::int64_t n_convergence = 100000;
  double level = 0.01;
  std::vector<std::string> identities;
  std::vector<std::string> convergence;
  /// Per-entry parameter points replacing the registry defaults.
  std::vector<std::pair<std::string, std::vector<LawParams>>> points;
  std::string json_path;
  std::string csv_path;
  int threads = 0;  // 0: hardware concurrency, capped by GNBLAB_THREADS
};

/// Parses the key = value format; `#` starts a comment. Throws ConfigError
/// with the offending line for malformed input or unknown ids.
SuiteConfig parse_suite_config(std::istream& in);
SuiteConfig load_suite_config(const std::string& path);

struct SuiteReport {
  SuiteConfig config;
  double comparison_level = 0.0;  // Bonferroni-adjusted
  int workers = 1;
  std::vector<IdentityReport> identities;
  std::vector<ConvergenceReport> convergence;

  std::size_t passed_count() const;
  std::size_t failed_count() const;
  bool all_passed() const;
};

/// Runs every listed entry; writes JSON and CSV when paths are set.
SuiteReport run_suite(const SuiteConfig& config);

void write_json(std::ostream& os, const SuiteReport& report);
void write_csv(std::ostream& os, const SuiteReport& report);

/// Worker count after applying GNBLAB_THREADS and hardware limits.
int resolve_threads(int requested);

}  // namespace gnblab
