#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gnblab/errors.hpp"
#include "gnblab/limits.hpp"
#include "gnblab/samplers.hpp"
#include "gnblab/stable.hpp"
#include "test_util.hpp"

using namespace gnblab;
using testutil::draws;
using testutil::empirical_cdf;
using testutil::mc_mean;

namespace {

constexpr double pi = std::numbers::pi;

// 3 s.e. band of an empirical CDF value.
double cdf_band(double p, std::size_t n) { return 3.0 * std::sqrt(p * (1.0 - p) / n) + 1e-4; }

}  // namespace

TEST(ALaw, CdfEndpoints) {
  const GammaMixedStableParams p{0.5, 0.5, 0.5};
  EXPECT_EQ(a_cdf(p, 0.0), 0.0);
  EXPECT_NEAR(a_cdf(p, 1e30), 1.0, 1e-6);
  EXPECT_THROW(a_cdf({0.5, 1.5, 1.0}, 1.0), DomainError);
}

TEST(ALaw, CdfMatchesSampler) {
  const GammaMixedStableParams p{0.5, 0.5, 0.5};
  RandomState rng(21);
  auto s = draws(1000000, [](RandomState& g) {
    return sample_one_sided(0.5, g) * std::pow(sample_gamma(0.5, 1.0, g), 4.0);
  }, rng);
  for (double x : {0.1, 1.0, 10.0}) {
    const double emp = empirical_cdf(s, x);
    EXPECT_NEAR(a_cdf(p, x), emp, cdf_band(emp, s.size())) << x;
  }
}

TEST(ALaw, Moments) {
  EXPECT_NEAR(a_moment({0.5, 0.5, 1.0}, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(a_moment({0.5, 0.5, 1.0}, 0.25), 1.0 / std::tgamma(0.75), 1e-12);
  EXPECT_NEAR(a_moment({0.5, 0.5, 1.0}, 0.25), 0.816049, 1e-6);
  EXPECT_THROW(a_moment({0.5, 0.5, 1.0}, 0.5), DomainError);
}

TEST(HLaw, CdfSymmetryAndSampler) {
  const GammaMixedStableParams p{0.5, 1.0, 1.0};
  EXPECT_NEAR(h_cdf(p, 0.0), 0.5, 1e-12);
  EXPECT_NEAR(h_cdf(p, -2.0), 1.0 - h_cdf(p, 2.0), 1e-10);
  RandomState rng(22);
  auto s = draws(1000000, [](RandomState& g) {
    return sample_symmetric(1.0, g) * sample_gamma(0.5, 1.0, g);
  }, rng);
  const double emp = empirical_cdf(s, 1.0);
  EXPECT_NEAR(h_cdf(p, 1.0), emp, cdf_band(emp, s.size()));
}

TEST(HLaw, Moments) {
  EXPECT_NEAR(h_abs_moment({1, 1, 1}, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(h_abs_moment({1, 1, 1}, 0.5), std::sqrt(2.0) * std::sqrt(pi) / 2, 1e-12);
  EXPECT_NEAR(h_abs_moment({1, 1, 1}, 0.5), 1.253314, 1e-6);
  EXPECT_THROW(h_abs_moment({1, 1.5, 1}, 1.5), DomainError);
}

TEST(HLaw, GeneralizedMixtureAgrees) {
  const GammaMixedStableParams p{0.7, 1.2, 0.8};
  for (double x : {-3.0, -0.5, 0.0, 0.4, 1.0, 2.5, 8.0}) {
    EXPECT_NEAR(a_cdf_general(p, 2.0, x), h_cdf(p, x), 1e-5) << x;
    EXPECT_NEAR(a_cdf_general(p, 1.6, x), h_cdf(p, x), 1e-5) << x;
  }
  EXPECT_THROW(a_cdf_general(p, 1.1, 0.0), DomainError);
}

TEST(Gvg, CdfPoints) {
  EXPECT_NEAR(gvg_cdf({1, 1, 1}, 0.0), 0.5, 1e-14);
  // X sqrt(W_1) is Laplace with scale 1/sqrt(2).
  EXPECT_NEAR(gvg_cdf({1, 1, 1}, 1.0), 1.0 - std::exp(-std::sqrt(2.0)) / 2, 1e-9);
  EXPECT_NEAR(gvg_cdf({1, 1, 1}, -1.0), std::exp(-std::sqrt(2.0)) / 2, 1e-9);
}

TEST(Gvg, CdfMatchesSampler) {
  RandomState rng(23);
  for (GVGParams p : {GVGParams{1.5, -1, 1}, GVGParams{0.5, 0.5, 2}}) {
    auto s = draws(200000, [&](RandomState& g) { return sample_gvg(p, g); }, rng);
    for (double x : {-1.0, 0.3, 2.0}) {
      const double emp = empirical_cdf(s, x);
      EXPECT_NEAR(gvg_cdf(p, x), emp, cdf_band(emp, s.size())) << p.alpha << " " << x;
    }
  }
}

TEST(Gvg, Moments) {
  EXPECT_NEAR(gvg_abs_moment({1, 1, 1}, 0.0), 1.0, 1e-15);
  // E X^2 E W_1 = 1.
  EXPECT_NEAR(gvg_abs_moment({1, 1, 1}, 2.0), 1.0, 1e-12);
  RandomState rng(24);
  const GVGParams p{0.5, 0.5, 1.0};
  auto m = mc_mean(1000000, [&](RandomState& g) { return std::abs(sample_gvg(p, g)); }, rng);
  EXPECT_NEAR(gvg_abs_moment(p, 1.0), m.value, 3 * m.std_error);
  EXPECT_THROW(gvg_abs_moment({0.1, -0.5, 1}, 1.0), DomainError);
}

TEST(Limits, Validation) {
  EXPECT_THROW(h_cdf({0.0, 1.0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(h_cdf({1.0, 2.0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(gvg_cdf({1.0, 0.0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(gvg_cdf({1.0, 1.0, -1.0}, 0.0), DomainError);
}
