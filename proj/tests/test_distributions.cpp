#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gnblab/distributions.hpp"
#include "gnblab/errors.hpp"
#include "gnblab/samplers.hpp"

using namespace gnblab;

namespace {

constexpr double pi = std::numbers::pi;

// Independent integrators for the normalization checks.
double integrate_half_line(const std::function<double(double)>& f, double a = 0.0) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double t) { return f(a + t); }, 1e-10);
}

double integrate_interval(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, 1e-10);
}

// Mittag-Leffler density at alpha = 1/2: -d/dx E_{1/2}(-sqrt x) with
// E_{1/2}(-z) = exp(z^2) erfc(z).
double ml_half_pdf(double x) {
  return 1.0 / std::sqrt(pi * x) - std::exp(x) * std::erfc(std::sqrt(x));
}

}  // namespace

TEST(GeneralizedGamma, PdfPoints) {
  EXPECT_DOUBLE_EQ(gg_pdf({1, 1, 1}, 0.0), 1.0);
  EXPECT_NEAR(gg_pdf({1, 2, 1}, 1.0), 2.0 * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(gg_pdf({0.5, 1, 0.5}, 1.0), 0.241971, 1e-6);
  EXPECT_TRUE(std::isinf(gg_pdf({0.5, 1, 1}, 0.0)));
  EXPECT_THROW(gg_pdf({1, 1, 1}, -1.0), DomainError);
  EXPECT_THROW(gg_pdf({1, 0, 1}, 1.0), DomainError);
}

TEST(GeneralizedGamma, CdfPoints) {
  EXPECT_NEAR(gg_cdf({1, 1, 1}, std::log(2.0)), 0.5, 1e-14);
  EXPECT_NEAR(gg_cdf({1, 2, 1}, 1.0), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(gg_cdf({0.5, -1, 1}, 1e16), 1.0, 1e-6);
  EXPECT_EQ(gg_cdf({0.5, -1, 1}, std::numeric_limits<double>::infinity()), 1.0);
  EXPECT_EQ(gg_cdf({0.5, -1, 1}, 0.0), 0.0);
}

TEST(GeneralizedGamma, PdfIntegratesToOne) {
  for (GGParams p : {GGParams{0.5, 0.5, 1}, GGParams{2, -1.5, 0.7}, GGParams{0.85, 0.917, 0.4},
                     GGParams{3, 2, 5}}) {
    const double total = integrate_half_line([&](double x) { return gg_pdf(p, x); });
    EXPECT_NEAR(total, 1.0, 1e-6) << p.r << " " << p.alpha << " " << p.lambda;
  }
}

TEST(GeneralizedGamma, CdfIsIntegralOfPdf) {
  const GGParams p{1.7, -0.8, 2.0};
  for (double x : {0.3, 1.0, 4.0, 25.0}) {
    const double area = integrate_interval([&](double t) { return gg_pdf(p, t); }, 0.0, x);
    EXPECT_NEAR(gg_cdf(p, x), area, 1e-9) << x;
  }
}

TEST(Gnb, PmfPoints) {
  EXPECT_NEAR(gnb_pmf({1, 1, 1}, 0), 0.5, 1e-14);
  EXPECT_NEAR(gnb_pmf({0.85, 1, 0.5}, 0), std::pow(1.0 / 3.0, 0.85), 1e-9);
  EXPECT_THROW(gnb_pmf({1, 1, 1}, -1), DomainError);
  EXPECT_THROW(gnb_pmf({-1, 1, 1}, 0), DomainError);
}

// P(N = k) = int e^{-z} z^k / k! g*(z) dz, evaluated by a separate integrator.
TEST(Gnb, PmfMatchesDirectMixture) {
  for (GNBParams p : {GNBParams{0.5, 0.9, 1}, GNBParams{0.85, 0.917, 0.4},
                      GNBParams{2, -1.2, 1.5}}) {
    for (std::int64_t k : {0, 1, 3, 10}) {
      const GGParams g{p.r, p.alpha, p.mu};
      const double direct = integrate_half_line([&](double z) {
        if (z == 0.0) return 0.0;
        return std::exp(-z + k * std::log(z) - std::lgamma(k + 1.0)) * gg_pdf(g, z);
      });
      EXPECT_NEAR(gnb_pmf(p, k), direct, 1e-9 * std::max(1.0, direct))
          << p.r << " " << p.alpha << " " << p.mu << " k=" << k;
    }
  }
}

TEST(Gnb, ReducesToNegativeBinomial) {
  double worst = 0.0;
  for (double r : {0.3, 0.85, 1.0, 2.5, 7.0}) {
    for (double mu : {0.05, 0.4, 1.0, 3.0, 20.0}) {
      for (std::int64_t k = 0; k <= 50; ++k) {
        worst = std::max(worst, std::abs(gnb_pmf({r, 1.0, mu}, k) - nb_pmf({r, mu / (1 + mu)}, k)));
      }
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Gnb, LogPmfStaysFinite) {
  const GNBParams p{0.85, 0.917, 0.4};
  EXPECT_NEAR(gnb_log_pmf(p, 5), std::log(gnb_pmf(p, 5)), 1e-10);
  const double far = gnb_log_pmf(p, 5000);
  EXPECT_TRUE(std::isfinite(far));
  EXPECT_LT(far, -700.0);
}

TEST(Gnb, TableMassInvariant) {
  for (GNBParams p : {GNBParams{0.85, 0.917, 0.4}, GNBParams{0.5, 0.5, 0.01},
                      GNBParams{2, -1, 1}, GNBParams{1, 3, 0.2}}) {
    for (std::int64_t k_max : {0, 5, 40, 400}) {
      auto t = gnb_pmf_table(p, k_max);
      EXPECT_EQ(t.probs.size(), static_cast<std::size_t>(k_max + 1));
      EXPECT_LT(t.mass_defect(), 1e-9) << p.r << " " << p.alpha << " " << p.mu << " " << k_max;
      EXPECT_NEAR(t.probs.back(), gnb_pmf(p, k_max), 1e-12);
    }
  }
}

TEST(NegativeBinomial, PmfPoints) {
  EXPECT_NEAR(nb_pmf({1, 0.5}, 2), 0.125, 1e-15);
  EXPECT_NEAR(nb_pmf({2, 0.5}, 1), 0.25, 1e-15);
  EXPECT_NEAR(nb_pmf({0.85, 0.5}, 0), 0.554785, 1e-6);
  EXPECT_THROW(nb_pmf({1, 1.0}, 0), DomainError);
  auto t = nb_pmf_table({0.85, 0.3}, 30);
  EXPECT_LT(t.mass_defect(), 1e-12);
}

TEST(MixedGeometric, MatchesGnb) {
  RandomState rng(5);
  auto e = mixed_geometric_pmf(MixedGeomParams{1, 1, 1}, 0, 1000000, rng);
  EXPECT_NEAR(e.value, 0.5, 3 * e.std_error);

  const MixedGeomParams p{0.85, 0.917, 0.3};
  auto e2 = mixed_geometric_pmf(p, 2, 1000000, rng);
  EXPECT_NEAR(e2.value, gnb_pmf({0.85, 0.917, 0.3}, 2), 3 * e2.std_error);
}

TEST(MixedGeometric, DegenerateSuccessProbability) {
  RandomState rng(6);
  auto e = mixed_geometric_pmf([](RandomState&) { return 0.5; }, 1, 10000, rng);
  EXPECT_DOUBLE_EQ(e.value, 0.25);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_THROW(mixed_geometric_pmf(MixedGeomParams{}, 0, 100, rng), DomainError);
}

TEST(MittagLeffler, Points) {
  EXPECT_NEAR(mittag_leffler_pdf(1.0, 2.0), std::exp(-2.0), 1e-15);
  EXPECT_THROW(mittag_leffler_pdf(1.2, 1.0), DomainError);
  EXPECT_THROW(mittag_leffler_pdf(0.5, 0.0), DomainError);
}

TEST(MittagLeffler, HalfClosedForm) {
  for (double x : {0.01, 0.2, 1.0, 2.9, 3.1, 6.0, 10.0, 20.0}) {
    EXPECT_NEAR(mittag_leffler_pdf(0.5, x), ml_half_pdf(x), 1e-9) << x;
  }
}

TEST(MittagLeffler, SeriesAndIntegralAgree) {
  EXPECT_NEAR(detail::mittag_leffler_series(0.7, 1.0), detail::mittag_leffler_integral(0.7, 1.0),
              1e-8);
  for (double alpha : {0.2, 0.5, 0.7, 0.95}) {
    for (double x = 1.5; x <= 4.5; x += 0.25) {
      EXPECT_NEAR(detail::mittag_leffler_series(alpha, x),
                  detail::mittag_leffler_integral(alpha, x), 1e-8)
          << alpha << " " << x;
    }
  }
}

// Leading tail term sin(pi a) Gamma(a+1) / (pi x^{a+1}). At a = 1/2 the next
// term of the expansion multiplies it by 1 - 1.5/x, so the ratio only
// settles for large x.
TEST(MittagLeffler, TailApproachesLeadingTerm) {
  auto leading = [](double a, double x) {
    return std::sin(pi * a) * std::tgamma(a + 1.0) / (pi * std::pow(x, a + 1.0));
  };
  EXPECT_NEAR(mittag_leffler_pdf(0.5, 1e4) / leading(0.5, 1e4), 1.0, 1e-3);
  // At a = 0.3 the correction terms decay like x^{-0.3}; sum the first six.
  auto series = [](double a, double x) {
    double sum = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const double sign = k % 2 == 1 ? 1.0 : -1.0;
      sum += sign * a * k * std::pow(x, -a * k - 1.0) / std::tgamma(1.0 - a * k);
    }
    return sum;
  };
  EXPECT_NEAR(mittag_leffler_pdf(0.3, 1e5) / series(0.3, 1e5), 1.0, 1e-5);
  // Two-term expansion at x = 10.
  const double x = 10.0;
  const double two_term = leading(0.5, x) * (1.0 - 1.5 / x);
  EXPECT_NEAR(mittag_leffler_pdf(0.5, x) / two_term, 1.0, 0.05);
}

TEST(MittagLeffler, IntegratesToOne) {
  for (double a : {0.3, 0.6, 0.9}) {
    EXPECT_NEAR(integrate_half_line([&](double x) {
                  return x == 0.0 ? 0.0 : mittag_leffler_pdf(a, x);
                }),
                1.0, 1e-6)
        << a;
  }
}

TEST(Linnik, LaplaceCase) {
  EXPECT_NEAR(linnik_pdf(2.0, 0.0), 0.5, 1e-9);
  EXPECT_NEAR(linnik_pdf(2.0, 1.0), std::exp(-1.0) / 2, 1e-9);
  EXPECT_NEAR(linnik_pdf(2.0, -3.0), std::exp(-3.0) / 2, 1e-9);
  EXPECT_TRUE(std::isinf(linnik_pdf(0.8, 0.0)));
}

TEST(Linnik, IntegratesToOne) {
  for (double a : {0.8, 1.5}) {
    const double half = integrate_half_line([&](double x) {
      return x == 0.0 ? 0.0 : linnik_pdf(a, x);
    });
    EXPECT_NEAR(2.0 * half, 1.0, 1e-6) << a;
  }
}

TEST(StableRatio, Points) {
  EXPECT_NEAR(stable_ratio_pdf(0.5, 1.0), 1.0 / (2 * pi), 1e-12);
  EXPECT_NEAR(stable_ratio_pdf(0.5, 4.0), 0.5 / (5 * pi), 1e-12);
  EXPECT_NEAR(stable_ratio_cdf(0.5, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(stable_ratio_cdf(0.3, 1.0), 0.5, 1e-12);
}

TEST(StableRatio, CdfIsIntegralOfPdf) {
  for (double a : {0.2, 0.5, 0.9}) {
    for (double x : {0.1, 1.0, 7.0}) {
      const double area = integrate_interval([&](double t) {
        return t == 0.0 ? 0.0 : stable_ratio_pdf(a, t);
      }, 0.0, x);
      EXPECT_NEAR(stable_ratio_cdf(a, x), area, 1e-8) << a << " " << x;
    }
  }
}

TEST(Gleser, Points) {
  EXPECT_EQ(gleser_mixing_pdf(0.5, 1.0, 0.5), 0.0);
  EXPECT_NEAR(gleser_mixing_pdf(0.5, 1.0, 2.0), 1.0 / (2 * pi), 1e-12);
  EXPECT_THROW(gleser_mixing_pdf(1.0, 1.0, 2.0), DomainError);
}

TEST(Gleser, IntegratesToOne) {
  const double total = integrate_half_line([](double t) {
    const double z = 2.0 + t;
    return z == 2.0 ? 0.0 : gleser_mixing_pdf(0.3, 2.0, z);
  });
  EXPECT_NEAR(total, 1.0, 1e-6);
  const double area = integrate_interval([](double z) {
    return z == 1.0 ? 0.0 : gleser_mixing_pdf(0.4, 1.0, z);
  }, 1.0, 3.0);
  EXPECT_NEAR(gleser_mixing_cdf(0.4, 1.0, 3.0), area, 1e-8);
}

TEST(SnedecorFisher, Points) {
  EXPECT_NEAR(snedecor_fisher_pdf(0.5, 1.0), 0.5 / pi, 1e-12);
  // x^{-r} blow-up at the origin.
  EXPECT_NEAR(snedecor_fisher_pdf(0.5, 1e-10) * std::sqrt(1e-10),
              snedecor_fisher_pdf(0.5, 1e-12) * std::sqrt(1e-12), 1e-8);
}

TEST(SnedecorFisher, IntegratesToOne) {
  const double total = integrate_half_line([](double x) {
    return x == 0.0 ? 0.0 : snedecor_fisher_pdf(0.3, x);
  });
  EXPECT_NEAR(total, 1.0, 1e-6);
  const double area = integrate_interval([](double x) {
    return x == 0.0 ? 0.0 : snedecor_fisher_pdf(0.6, x);
  }, 0.0, 2.0);
  EXPECT_NEAR(snedecor_fisher_cdf(0.6, 2.0), area, 1e-8);
}

// P(Y > 1 - eps) ~ eps^{alpha r}: at (0.5, 0.5) about 1e-4 of the mass lies
// where 1 - y is below double resolution, so normalization is checked on the
// odds scale and the y-scale total only to that resolution.
TEST(SuccessProbability, IntegratesToOne) {
  for (MixedGeomParams p : {MixedGeomParams{0.5, 0.5, 1}, MixedGeomParams{0.85, 0.917, 0.4}}) {
    const double odds_total = integrate_half_line([&](double w) {
      return w == 0.0 ? 0.0 : success_odds_pdf(p, w);
    });
    EXPECT_NEAR(odds_total, 1.0, 1e-6) << p.r << " " << p.alpha;
    const double total = integrate_interval([&](double y) {
      return (y <= 0.0 || y >= 1.0) ? 0.0 : success_prob_pdf(p, y);
    }, 0.0, 1.0);
    EXPECT_NEAR(total, 1.0, 2e-4) << p.r << " " << p.alpha;
  }
}

TEST(SuccessProbability, DensityIsOddsImage) {
  const MixedGeomParams p{0.5, 0.5, 1};
  for (double y : {0.2, 0.5, 0.9}) {
    const double w = y / (1.0 - y);
    EXPECT_DOUBLE_EQ(success_prob_pdf(p, y), success_odds_pdf(p, w) / ((1 - y) * (1 - y)));
  }
}

// alpha = 1: Y = Z / (1 + Z), so q(y) = p(y / (1 - y)) / (1 - y)^2.
TEST(SuccessProbability, AlphaOneIsGleserImage) {
  const double r = 0.6, mu = 0.5;
  for (double y = 0.35; y < 0.99; y += 0.05) {
    const double z = y / (1.0 - y);
    const double expected = gleser_mixing_pdf(r, mu, z) / ((1.0 - y) * (1.0 - y));
    EXPECT_NEAR(success_prob_pdf({r, 1.0, mu}, y), expected, 1e-6 * std::max(1.0, expected)) << y;
  }
}
