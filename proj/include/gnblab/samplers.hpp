#pragma once

// Exact samplers for the composite laws, each built from the representation
// it is named after, plus the named-law registry used by the CLI.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gnblab/distributions.hpp"
#include "gnblab/random.hpp"

namespace gnblab {

/// log G_{r,1}; stays finite where G_{r,1} itself underflows (small r).
double sample_log_gamma(double r, RandomState& rng);
/// Gamma with shape r and rate lambda.
double sample_gamma(double r, double lambda, RandomState& rng);
std::int64_t sample_poisson(double rate, RandomState& rng);
std::int64_t sample_binomial(std::int64_t m, double p, RandomState& rng);
/// P(N = k) = p (1 - p)^k, k >= 0.
std::int64_t sample_geometric(double p, RandomState& rng);

double sample_gg(const GGParams& p, RandomState& rng);
double sample_weibull(double alpha, RandomState& rng);
/// Z_{r,mu} = mu (G_{r,1} + G_{1-r,1}) / G_{r,1}; equals mu when r = 1.
double sample_gleser_Z(double r, double mu, RandomState& rng);
/// Snedecor-Fisher Q_{1-r,r} by inversion of its distribution function.
double sample_snedecor_fisher(double r, RandomState& rng);
double sample_success_prob(const MixedGeomParams& p, RandomState& rng);
std::int64_t sample_gnb(const GNBParams& p, RandomState& rng);
std::int64_t sample_nb(const NBParams& p, RandomState& rng);
std::int64_t sample_mixed_geometric(const MixedGeomParams& p, RandomState& rng);
double sample_mittag_leffler(double alpha, RandomState& rng);
double sample_linnik(double alpha, RandomState& rng);
std::int64_t sample_mixed_binomial(std::int64_t m, const MixedGeomParams& y_law,
                                   RandomState& rng);

enum class SummandKind {
  Exponential,          // nonnegative, mean 1
  OneSidedStable,       // S_{alpha,1} summands
  SymmetricStable,      // S_{alpha,0} summands
  CenteredExponential,  // W_1 - 1: mean 0, variance 1
};

struct RandomSumSpec {
  SummandKind kind = SummandKind::Exponential;
  double summand_alpha = 1.0;  // stable index for the stable kinds
  double r = 1.0;              // GNB shape of the random index
  double alpha_prime = 1.0;    // GNB exponent power of the random index
};

/// Sum of N_{r,alpha',n^{-alpha'}} i.i.d. summands, normalized by n,
/// n^{1/alpha} or sqrt(n) according to the summand kind. Partial sums are
/// drawn from their exact laws (Gamma(N, 1), N^{1/alpha} S).
double sample_random_sum(const RandomSumSpec& spec, std::int64_t n, RandomState& rng);

using LawParams = std::map<std::string, double>;

/// Seed-stamped draws from a named law.
struct SampleBatch {
  std::string law;
  LawParams params;
  std::uint64_t seed = 0;
  std::vector<double> values;
};

struct LawInfo {
  std::string name;
  std::vector<std::string> params;
  bool integer_valued = false;
};

const std::vector<LawInfo>& law_registry();

/// Draws `count` values of a registered law from RandomState(seed).
/// Throws ConfigError for an unknown law or a missing parameter.
SampleBatch draw_batch(const std::string& law, const LawParams& params, std::size_t count,
                       std::uint64_t seed);

/// "key=value;key=value" with keys in sorted order.
std::string format_params(const LawParams& params);

/// Metadata line followed by one value per line.
void write_csv(std::ostream& os, const SampleBatch& batch);

}  // namespace gnblab
