#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gnblab/errors.hpp"
#include "gnblab/stable.hpp"
#include "test_util.hpp"

using namespace gnblab;
using gnblab::testutil::mc_mean;

namespace {

constexpr double pi = std::numbers::pi;

double levy_pdf(double x) {
  return std::exp(-1.0 / (4.0 * x)) / (2.0 * std::sqrt(pi) * std::pow(x, 1.5));
}
double levy_cdf(double x) { return std::erfc(1.0 / (2.0 * std::sqrt(x))); }

}  // namespace

TEST(StablePdf, ClosedFormPoints) {
  EXPECT_NEAR(stable_pdf({2.0, 0.0}, 0.0), 0.282095, 1e-6);
  EXPECT_NEAR(stable_pdf({1.0, 0.0}, 0.0), 1.0 / pi, 1e-12);
  EXPECT_NEAR(stable_pdf({0.5, 1.0}, 1.0), 0.219696, 1e-6);
}

TEST(StableCdf, ClosedFormPoints) {
  EXPECT_DOUBLE_EQ(stable_cdf({1.0, 0.0}, 0.0), 0.5);
  EXPECT_EQ(stable_cdf({0.5, 1.0}, 0.0), 0.0);
  EXPECT_NEAR(stable_cdf({0.5, 1.0}, 1.0), std::erfc(0.5), 1e-6);
}

// The angular integral must reproduce the closed forms it is bypassed for.
TEST(StableIntegral, ReproducesLevy) {
  for (double x : {0.01, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0, 1e4}) {
    EXPECT_NEAR(detail::stable_pdf_integral(0.5, 1.0, x), levy_pdf(x), 1e-8) << x;
    EXPECT_NEAR(detail::stable_cdf_integral(0.5, 1.0, x), levy_cdf(x), 1e-8) << x;
    // Reflected law.
    EXPECT_NEAR(detail::stable_pdf_integral(0.5, -1.0, -x), levy_pdf(x), 1e-8) << x;
  }
  EXPECT_EQ(detail::stable_pdf_integral(0.5, 1.0, -1.0), 0.0);
}

TEST(StableIntegral, ApproachesNormalNearAlphaTwo) {
  for (double x : {0.0, 0.5, 1.5, 3.0}) {
    EXPECT_NEAR(detail::stable_pdf_integral(1.9999, 0.0, x), stable_pdf({2.0, 0.0}, x), 1e-4);
  }
}

TEST(StablePdf, IntegratesToOne) {
  boost::math::quadrature::exp_sinh<double> integrator;
  for (StableParams p : {StableParams{0.7, 0.3}, StableParams{1.5, -0.3}, StableParams{0.4, 1.0}}) {
    auto right = integrator.integrate([&](double x) { return stable_pdf(p, x); }, 1e-9);
    double left = 0.0;
    if (p.theta < 1.0) {
      left = integrator.integrate([&](double x) { return stable_pdf(p, -x); }, 1e-9);
    }
    EXPECT_NEAR(left + right, 1.0, 1e-6) << p.alpha << " " << p.theta;
  }
}

TEST(StableCdf, DerivativeMatchesPdf) {
  const StableParams p{1.3, 0.2};
  for (double x : {-2.0, -0.3, 0.4, 1.7, 6.0}) {
    const double h = 1e-4;
    const double slope = (stable_cdf(p, x + h) - stable_cdf(p, x - h)) / (2 * h);
    EXPECT_NEAR(slope, stable_pdf(p, x), 1e-6) << x;
  }
  EXPECT_NEAR(stable_cdf(p, 0.0), 0.4, 1e-12);
}

TEST(StableAbsMoment, Oracles) {
  EXPECT_NEAR(stable_abs_moment({1.0, 0.0}, 0.5), std::sqrt(2.0), 1e-12);
  for (double beta : {0.1, 0.3, 0.7, 0.9}) {
    EXPECT_NEAR(stable_abs_moment({1.0, 0.0}, beta), 1.0 / std::cos(pi * beta / 2), 1e-12);
  }
  EXPECT_NEAR(stable_abs_moment({0.5, 1.0}, 0.25), std::tgamma(0.5) / std::tgamma(0.75), 1e-6);
  // Normal case: E|sqrt(2) X| = 2 / sqrt(pi).
  EXPECT_NEAR(stable_abs_moment({2.0, 0.0}, 1.0), 2.0 / std::sqrt(pi), 1e-12);
  EXPECT_THROW(stable_abs_moment({0.8, 0.0}, 0.8), DomainError);
  EXPECT_THROW(stable_abs_moment({1.5, 0.2}, 0.5), DomainError);
}

TEST(StableParams, Validation) {
  EXPECT_THROW(stable_pdf({2.5, 0.0}, 0.0), DomainError);
  EXPECT_THROW(stable_pdf({1.5, 0.5}, 0.0), DomainError);
  EXPECT_THROW(stable_cdf({1.0, 1.0}, 0.0), DomainError);
  EXPECT_TRUE(is_degenerate({1.0, -1.0}));
}

TEST(StableSampler, OneSidedDegenerateAtAlphaOne) {
  RandomState rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_one_sided(1.0, rng), 1.0);
}

TEST(StableSampler, OneSidedMomentAndCdf) {
  RandomState rng(11);
  auto draws = testutil::draws(1000000, [](RandomState& g) { return sample_one_sided(0.5, g); }, rng);
  double sum = 0.0, sum_sq = 0.0;
  for (double d : draws) {
    const double v = std::pow(d, 0.25);
    sum += v;
    sum_sq += v * v;
  }
  const double n = draws.size();
  const double m = sum / n;
  const double se = std::sqrt((sum_sq / n - m * m) / n);
  EXPECT_NEAR(m, std::tgamma(0.5) / std::tgamma(0.75), 3 * se);
  EXPECT_NEAR(testutil::empirical_cdf(draws, 1.0), std::erfc(0.5), 0.005);
}

TEST(StableSampler, SymmetricSpecialCases) {
  RandomState rng(12);
  auto normal = mc_mean(1000000, [](RandomState& g) {
    const double s = sample_symmetric(2.0, g);
    return s * s;
  }, rng);
  EXPECT_NEAR(normal.value, 2.0, 0.02);

  auto cauchy = testutil::draws(1000000, [](RandomState& g) { return sample_symmetric(1.0, g); }, rng);
  EXPECT_NEAR(testutil::empirical_cdf(cauchy, 0.0), 0.5, 0.005);

  auto m = mc_mean(1000000, [](RandomState& g) {
    return std::sqrt(std::abs(sample_symmetric(1.5, g)));
  }, rng);
  EXPECT_NEAR(m.value, stable_abs_moment({1.5, 0.0}, 0.5), 3 * m.std_error);
}

TEST(StableSampler, SkewedMatchesCdf) {
  const StableParams p{1.5, 0.3};
  RandomState rng(13);
  auto draws = testutil::draws(200000, [&](RandomState& g) { return sample_stable(p, g); }, rng);
  for (double x : {-1.0, 0.0, 1.0, 3.0}) {
    EXPECT_NEAR(testutil::empirical_cdf(draws, x), stable_cdf(p, x), 0.005) << x;
  }
}

TEST(StableSampler, RatioHasMedianOne) {
  RandomState rng(14);
  auto draws = testutil::draws(1000000, [](RandomState& g) { return sample_ratio(0.5, g); }, rng);
  EXPECT_NEAR(testutil::empirical_cdf(draws, 1.0), 0.5, 0.005);
  EXPECT_THROW(sample_ratio(1.0, rng), DomainError);
}

TEST(StableSampler, Reproducible) {
  RandomState a(99, 3), b(99, 3);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(sample_stable({0.8, 0.4}, a), sample_stable({0.8, 0.4}, b));
  }
}
