#include "gnblab/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gnblab/distributions.hpp"
#include "gnblab/errors.hpp"
#include "gnblab/limits.hpp"
#include "gnblab/stable.hpp"
#include "gnblab/stats.hpp"
#include "gnblab/version.hpp"

namespace gnblab {

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::KS2: return "KS2";
    case TestKind::KS1: return "KS1";
    case TestKind::CHI2: return "CHI2";
  }
  return "?";
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RandomState stream_for(std::uint64_t seed, const std::string& key) {
  return RandomState(seed, fnv1a(key));
}

double need(const LawParams& p, const std::string& id, const char* key) {
  auto it = p.find(key);
  if (it == p.end()) {
    throw ConfigError("entry '" + id + "' requires parameter '" + key + "'");
  }
  return it->second;
}

std::vector<double> draw_n(const Drawer& d, std::int64_t n, RandomState rng) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = d(rng);
  return out;
}

std::vector<std::int64_t> as_counts(const std::vector<double>& v) {
  std::vector<std::int64_t> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(),
                 [](double x) { return static_cast<std::int64_t>(x); });
  return out;
}

// Building blocks named after the variables they draw.
double W1(RandomState& g) { return standard_exponential(g); }
double S1(double a, RandomState& g) { return sample_one_sided(a, g); }
double S0(double a, RandomState& g) { return sample_symmetric(a, g); }
double Zr(double r, RandomState& g) { return sample_gleser_Z(r, 1.0, g); }
double M(double a, RandomState& g) { return sample_mittag_leffler(a, g); }

// Common denominator S'_{alpha',1}^{1/alpha} Z_{r,1}^{1/(alpha alpha')} of the
// gamma-mixed stable chain.
double chain_denominator(double r, double a, double ap, RandomState& g) {
  const double s = ap == 1.0 ? 1.0 : S1(ap, g);
  return std::pow(s, 1.0 / a) * std::pow(Zr(r, g), 1.0 / (a * ap));
}

std::vector<IdentitySpec> build_identities() {
  std::vector<IdentitySpec> v;
  using P = LawParams;

  v.push_back({"T1",
               "G*_{r,alpha,mu} = W_1 / (S_{alpha,1} Z_{r,mu}^{1/alpha}), 0<r<=1, 0<alpha<=1",
               TestKind::KS2,
               {P{{"r", 0.5}, {"alpha", 0.5}, {"mu", 1.0}},
                P{{"r", 0.85}, {"alpha", 0.917}, {"mu", 0.4}},
                P{{"r", 0.3}, {"alpha", 0.8}, {"mu", 2.0}}},
               [](const P& p) {
                 const double r = need(p, "T1", "r"), a = need(p, "T1", "alpha"),
                              mu = need(p, "T1", "mu");
                 IdentityPaths paths;
                 paths.baseline_name = "G*_{r,alpha,mu}";
                 paths.baseline = [=](RandomState& g) { return sample_gg({r, a, mu}, g); };
                 paths.representations.push_back(
                     {"W_1/(S_{alpha,1} Z_{r,mu}^{1/alpha})", [=](RandomState& g) {
                        const double s = a == 1.0 ? 1.0 : S1(a, g);
                        return W1(g) / (s * std::pow(sample_gleser_Z(r, mu, g), 1.0 / a));
                      }});
                 return paths;
               }});

  v.push_back({"T2", "N_{r,alpha,mu} is Y_{r,alpha,mu}-mixed geometric, 0<r<=1, 0<alpha<=1",
               TestKind::CHI2,
               {P{{"r", 0.85}, {"alpha", 0.917}, {"mu", 0.4}},
                P{{"r", 0.5}, {"alpha", 0.5}, {"mu", 1.0}},
                P{{"r", 0.3}, {"alpha", 0.8}, {"mu", 2.0}}},
               [](const P& p) {
                 const double r = need(p, "T2", "r"), a = need(p, "T2", "alpha"),
                              mu = need(p, "T2", "mu");
                 IdentityPaths paths;
                 paths.baseline_name = "GNB(r,alpha,mu)";
                 paths.baseline = [=](RandomState& g) {
                   return static_cast<double>(sample_gnb({r, a, mu}, g));
                 };
                 paths.representations.push_back({"Y-mixed geometric", [=](RandomState& g) {
                                                    return static_cast<double>(
                                                        sample_mixed_geometric({r, a, mu}, g));
                                                  }});
                 return paths;
               }});

  v.push_back({"T3chain",
               "G*_{r,alpha,1} = W_1/(S_{alpha,1} Z_{r,1}^{1/alpha}) = W_alpha/Z_{r,1}^{1/alpha} "
               "= (W_1 G_r/(G_r+G_{1-r}))^{1/alpha} = W_alpha (1+(1-r)/r Q_{1-r,r})^{-1/alpha}",
               TestKind::KS2,
               {P{{"r", 0.5}, {"alpha", 0.5}},
                P{{"r", 0.85}, {"alpha", 0.917}},
                P{{"r", 0.3}, {"alpha", 0.8}}},
               [](const P& p) {
                 const double r = need(p, "T3chain", "r"), a = need(p, "T3chain", "alpha");
                 if (!(r > 0.0 && r < 1.0)) throw DomainError("T3chain: r must lie in (0, 1)");
                 IdentityPaths paths;
                 paths.baseline_name = "G*_{r,alpha,1}";
                 paths.baseline = [=](RandomState& g) { return sample_gg({r, a, 1.0}, g); };
                 paths.representations.push_back(
                     {"W_1/(S_{alpha,1} Z_{r,1}^{1/alpha})", [=](RandomState& g) {
                        const double s = a == 1.0 ? 1.0 : S1(a, g);
                        return W1(g) / (s * std::pow(Zr(r, g), 1.0 / a));
                      }});
                 paths.representations.push_back(
                     {"W_alpha/Z_{r,1}^{1/alpha}", [=](RandomState& g) {
                        return sample_weibull(a, g) / std::pow(Zr(r, g), 1.0 / a);
                      }});
                 paths.representations.push_back(
                     {"(W_1 G_r/(G_r+G_{1-r}))^{1/alpha}", [=](RandomState& g) {
                        const double w = W1(g);
                        const double l1 = sample_log_gamma(r, g);
                        const double l2 = sample_log_gamma(1.0 - r, g);
                        const double share = 1.0 / (1.0 + std::exp(l2 - l1));
                        return std::pow(w * share, 1.0 / a);
                      }});
                 paths.representations.push_back(
                     {"W_alpha (1+(1-r)/r Q_{1-r,r})^{-1/alpha}", [=](RandomState& g) {
                        const double w = sample_weibull(a, g);
                        const double q = sample_snedecor_fisher(r, g);
                        return w * std::pow(1.0 + (1.0 - r) / r * q, -1.0 / a);
                      }});
                 return paths;
               }});

  v.push_back({"L3", "W_alpha = W_1 / S_{alpha,1}, 0<alpha<=1", TestKind::KS2,
               {P{{"alpha", 0.3}}, P{{"alpha", 0.5}}, P{{"alpha", 0.8}}},
               [](const P& p) {
                 const double a = need(p, "L3", "alpha");
                 IdentityPaths paths;
                 paths.baseline_name = "W_alpha";
                 paths.baseline = [=](RandomState& g) { return sample_weibull(a, g); };
                 paths.representations.push_back(
                     {"W_1/S_{alpha,1}", [=](RandomState& g) { return W1(g) / S1(a, g); }});
                 return paths;
               }});

  v.push_back({"E6", "M_alpha = W_1^{1/alpha} S_{alpha,1} = W_1 R_alpha, 0<alpha<1",
               TestKind::KS2, {P{{"alpha", 0.3}}, P{{"alpha", 0.5}}, P{{"alpha", 0.8}}},
               [](const P& p) {
                 const double a = need(p, "E6", "alpha");
                 IdentityPaths paths;
                 paths.baseline_name = "W_1^{1/alpha} S_{alpha,1}";
                 paths.baseline = [=](RandomState& g) {
                   return std::pow(W1(g), 1.0 / a) * S1(a, g);
                 };
                 paths.representations.push_back(
                     {"W_1 R_alpha", [=](RandomState& g) { return W1(g) * sample_ratio(a, g); }});
                 return paths;
               }});

  v.push_back({"E9",
               "L_alpha = W_1^{1/alpha} S_{alpha,0} = X sqrt(2 M_{alpha/2}) = Lambda sqrt(R_{alpha/2})",
               TestKind::KS2, {P{{"alpha", 0.8}}, P{{"alpha", 1.2}}, P{{"alpha", 1.8}}},
               [](const P& p) {
                 const double a = need(p, "E9", "alpha");
                 if (!(a > 0.0 && a < 2.0)) throw DomainError("E9: alpha must lie in (0, 2)");
                 IdentityPaths paths;
                 paths.baseline_name = "W_1^{1/alpha} S_{alpha,0}";
                 paths.baseline = [=](RandomState& g) {
                   return std::pow(W1(g), 1.0 / a) * S0(a, g);
                 };
                 paths.representations.push_back(
                     {"X sqrt(2 M_{alpha/2})", [=](RandomState& g) {
                        return standard_normal(g) * std::sqrt(2.0 * M(a / 2.0, g));
                      }});
                 paths.representations.push_back(
                     {"Lambda sqrt(R_{alpha/2})", [=](RandomState& g) {
                        return standard_laplace(g) * std::sqrt(sample_ratio(a / 2.0, g));
                      }});
                 return paths;
               }});

  v.push_back({"E30chain",
               "S_{alpha,1} G_r^{1/(alpha alpha')} and its mixed exponential representations, "
               "0<r<1, 0<alpha<1, 0<alpha'<=1",
               TestKind::KS2,
               {P{{"r", 0.5}, {"alpha", 0.5}, {"alpha_prime", 0.5}},
                P{{"r", 0.85}, {"alpha", 0.7}, {"alpha_prime", 0.917}},
                P{{"r", 0.3}, {"alpha", 0.8}, {"alpha_prime", 1.0}}},
               [](const P& p) {
                 const double r = need(p, "E30chain", "r"), a = need(p, "E30chain", "alpha"),
                              ap = need(p, "E30chain", "alpha_prime");
                 if (!(r > 0.0 && r < 1.0)) throw DomainError("E30chain: r must lie in (0, 1)");
                 if (!(a > 0.0 && a < 1.0)) throw DomainError("E30chain: alpha must lie in (0, 1)");
                 if (!(ap > 0.0 && ap <= 1.0)) {
                   throw DomainError("E30chain: alpha' must lie in (0, 1]");
                 }
                 IdentityPaths paths;
                 paths.baseline_name = "S_{alpha,1} G_r^{1/(alpha alpha')}";
                 paths.baseline = [=](RandomState& g) {
                   return sample_a({r, a, ap}, g);
                 };
                 auto& reps = paths.representations;
                 reps.push_back({"S_{alpha,1} (G*_{r,alpha',1})^{1/alpha}", [=](RandomState& g) {
                                   return S1(a, g) * std::pow(sample_gg({r, ap, 1.0}, g), 1.0 / a);
                                 }});
                 reps.push_back({"W_1^{1/alpha} S_{alpha,1} / D", [=](RandomState& g) {
                                   const double num = std::pow(W1(g), 1.0 / a) * S1(a, g);
                                   return num / chain_denominator(r, a, ap, g);
                                 }});
                 reps.push_back({"W_alpha S_{alpha,1} / D", [=](RandomState& g) {
                                   const double num = sample_weibull(a, g) * S1(a, g);
                                   return num / chain_denominator(r, a, ap, g);
                                 }});
                 reps.push_back({"R_alpha W_1 / D", [=](RandomState& g) {
                                   const double num = sample_ratio(a, g) * W1(g);
                                   return num / chain_denominator(r, a, ap, g);
                                 }});
                 reps.push_back({"M_alpha / D", [=](RandomState& g) {
                                   return M(a, g) / chain_denominator(r, a, ap, g);
                                 }});
                 reps.push_back({"|X| sqrt(2 W_1) R_alpha / D", [=](RandomState& g) {
                                   const double num = std::abs(standard_normal(g)) *
                                                      std::sqrt(2.0 * W1(g)) * sample_ratio(a, g);
                                   return num / chain_denominator(r, a, ap, g);
                                 }});
                 reps.push_back({"|Lambda| R_alpha / D", [=](RandomState& g) {
                                   const double num = std::abs(standard_laplace(g)) *
                                                      sample_ratio(a, g);
                                   return num / chain_denominator(r, a, ap, g);
                                 }});
                 reps.push_back({"S_{alpha,1} (W_{alpha'}/Z_{r,1}^{1/alpha'})^{1/alpha}",
                                 [=](RandomState& g) {
                                   const double s = S1(a, g);
                                   const double inner =
                                       sample_weibull(ap, g) / std::pow(Zr(r, g), 1.0 / ap);
                                   return s * std::pow(inner, 1.0 / a);
                                 }});
                 reps.push_back({"S_{alpha,1} W_{alpha alpha'} / Z_{r,1}^{1/(alpha alpha')}",
                                 [=](RandomState& g) {
                                   const double s = S1(a, g);
                                   const double w = sample_weibull(a * ap, g);
                                   return s * w / std::pow(Zr(r, g), 1.0 / (a * ap));
                                 }});
                 return paths;
               }});

  v.push_back({"E35chain",
               "S_{alpha,0} G_r^{1/alpha} = Lambda sqrt(R_{alpha/2})/Z_{r,1}^{1/alpha} "
               "= X sqrt(2 M_{alpha/2})/Z_{r,1}^{1/alpha} = L_alpha/Z_{r,1}^{1/alpha}, 0<r<1",
               TestKind::KS2,
               {P{{"r", 0.5}, {"alpha", 1.0}},
                P{{"r", 0.3}, {"alpha", 1.5}},
                P{{"r", 0.8}, {"alpha", 0.6}}},
               [](const P& p) {
                 const double r = need(p, "E35chain", "r"), a = need(p, "E35chain", "alpha");
                 if (!(r > 0.0 && r < 1.0)) throw DomainError("E35chain: r must lie in (0, 1)");
                 IdentityPaths paths;
                 paths.baseline_name = "S_{alpha,0} G_r^{1/alpha}";
                 paths.baseline = [=](RandomState& g) { return sample_h({r, a, 1.0}, g); };
                 paths.representations.push_back(
                     {"Lambda sqrt(R_{alpha/2})/Z_{r,1}^{1/alpha}", [=](RandomState& g) {
                        const double num = standard_laplace(g) * std::sqrt(sample_ratio(a / 2.0, g));
                        return num / std::pow(Zr(r, g), 1.0 / a);
                      }});
                 paths.representations.push_back(
                     {"X sqrt(2 M_{alpha/2})/Z_{r,1}^{1/alpha}", [=](RandomState& g) {
                        const double num = standard_normal(g) * std::sqrt(2.0 * M(a / 2.0, g));
                        return num / std::pow(Zr(r, g), 1.0 / a);
                      }});
                 paths.representations.push_back(
                     {"L_alpha/Z_{r,1}^{1/alpha}", [=](RandomState& g) {
                        const double l = std::pow(W1(g), 1.0 / a) * S0(a, g);
                        return l / std::pow(Zr(r, g), 1.0 / a);
                      }});
                 return paths;
               }});

  v.push_back({"E1", "S_{alpha,0} = X sqrt(2 S_{alpha/2,1}), 0<alpha<2", TestKind::KS2,
               {P{{"alpha", 0.8}}, P{{"alpha", 1.2}}, P{{"alpha", 1.6}}},
               [](const P& p) {
                 const double a = need(p, "E1", "alpha");
                 if (!(a > 0.0 && a < 2.0)) throw DomainError("E1: alpha must lie in (0, 2)");
                 IdentityPaths paths;
                 paths.baseline_name = "S_{alpha,0}";
                 paths.baseline = [=](RandomState& g) { return S0(a, g); };
                 paths.representations.push_back(
                     {"X sqrt(2 S_{alpha/2,1})", [=](RandomState& g) {
                        return standard_normal(g) * std::sqrt(2.0 * S1(a / 2.0, g));
                      }});
                 return paths;
               }});

  v.push_back({"INV", "(G*_{r,alpha,mu})^{-1} = G*_{r,-alpha,mu}", TestKind::KS1,
               {P{{"r", 0.5}, {"alpha", 0.5}, {"mu", 1.0}},
                P{{"r", 2.0}, {"alpha", 1.5}, {"mu", 0.7}},
                P{{"r", 0.85}, {"alpha", 0.917}, {"mu", 0.4}}},
               [](const P& p) {
                 const double r = need(p, "INV", "r"), a = need(p, "INV", "alpha"),
                              mu = need(p, "INV", "mu");
                 IdentityPaths paths;
                 paths.baseline_name = "1/G*_{r,alpha,mu}";
                 paths.baseline = [=](RandomState& g) { return 1.0 / sample_gg({r, a, mu}, g); };
                 paths.cdf = [=](double x) { return gg_cdf({r, -a, mu}, x); };
                 return paths;
               }});

  v.push_back({"T7LAP",
               "S_{alpha,0} G_r^{1/(alpha alpha')} = Lambda Z_{r,1}^{-1/(alpha alpha')} "
               "sqrt(S_{alpha/2,1}/S'_{alpha alpha'/2,1}), 0<r<1, 0<alpha'<=1",
               TestKind::KS2,
               {P{{"r", 0.5}, {"alpha", 1.2}, {"alpha_prime", 0.8}},
                P{{"r", 0.3}, {"alpha", 1.5}, {"alpha_prime", 0.5}},
                P{{"r", 0.85}, {"alpha", 0.8}, {"alpha_prime", 1.0}}},
               [](const P& p) {
                 const double r = need(p, "T7LAP", "r"), a = need(p, "T7LAP", "alpha"),
                              ap = need(p, "T7LAP", "alpha_prime");
                 if (!(r > 0.0 && r < 1.0)) throw DomainError("T7LAP: r must lie in (0, 1)");
                 if (!(ap > 0.0 && ap <= 1.0)) throw DomainError("T7LAP: alpha' must lie in (0, 1]");
                 IdentityPaths paths;
                 paths.baseline_name = "S_{alpha,0} G_r^{1/(alpha alpha')}";
                 paths.baseline = [=](RandomState& g) { return sample_h({r, a, ap}, g); };
                 paths.representations.push_back(
                     {"Lambda Z^{-1/(alpha alpha')} sqrt(S_{alpha/2,1}/S'_{alpha alpha'/2,1})",
                      [=](RandomState& g) {
                        const double l = standard_laplace(g);
                        const double z = std::pow(Zr(r, g), -1.0 / (a * ap));
                        const double num = S1(a / 2.0, g);
                        const double den = S1(a * ap / 2.0, g);
                        return l * z * std::sqrt(num / den);
                      }});
                 return paths;
               }});

  v.push_back({"MULT",
               "S_{alpha,0} G_r^{1/(alpha alpha')} = S_{a*,0} (S_{alpha/a*,1} "
               "G_r^{a*/(alpha alpha')})^{1/a*} for alpha < a* <= 2",
               TestKind::KS2,
               {P{{"r", 0.5}, {"alpha", 1.0}, {"alpha_prime", 1.0}},
                P{{"r", 0.85}, {"alpha", 0.7}, {"alpha_prime", 0.917}},
                P{{"r", 1.5}, {"alpha", 1.2}, {"alpha_prime", 0.8}}},
               [](const P& p) {
                 const double r = need(p, "MULT", "r"), a = need(p, "MULT", "alpha"),
                              ap = need(p, "MULT", "alpha_prime");
                 IdentityPaths paths;
                 paths.baseline_name = "S_{alpha,0} G_r^{1/(alpha alpha')}";
                 paths.baseline = [=](RandomState& g) { return sample_h({r, a, ap}, g); };
                 for (double as : {1.5, 2.0}) {
                   if (!(as > a)) continue;
                   char name[96];
                   std::snprintf(name, sizeof name, "a*=%g mixture", as);
                   paths.representations.push_back({name, [=](RandomState& g) {
                                                      const double z = sample_a({r, a / as, ap}, g);
                                                      return S0(as, g) * std::pow(z, 1.0 / as);
                                                    }});
                 }
                 return paths;
               }});

  // Negative controls: deliberately false identities that must be rejected.
  v.push_back({"NC-W", "W_1 vs W_2 (false)", TestKind::KS2, {P{}},
               [](const P&) {
                 IdentityPaths paths;
                 paths.baseline_name = "W_1";
                 paths.baseline = [](RandomState& g) { return W1(g); };
                 paths.representations.push_back(
                     {"W_2", [](RandomState& g) { return sample_weibull(2.0, g); }});
                 return paths;
               },
               true});
  v.push_back({"NC-NB", "GNB(r,alpha,mu) vs NB(r, mu/(1+mu)) with alpha != 1 (false)",
               TestKind::CHI2, {P{{"r", 0.85}, {"alpha", 0.6}, {"mu", 0.4}}},
               [](const P& p) {
                 const double r = need(p, "NC-NB", "r"), a = need(p, "NC-NB", "alpha"),
                              mu = need(p, "NC-NB", "mu");
                 IdentityPaths paths;
                 paths.baseline_name = "GNB(r,alpha,mu)";
                 paths.baseline = [=](RandomState& g) {
                   return static_cast<double>(sample_gnb({r, a, mu}, g));
                 };
                 paths.representations.push_back({"NB(r,mu/(1+mu))", [=](RandomState& g) {
                                                    return static_cast<double>(
                                                        sample_nb({r, mu / (1.0 + mu)}, g));
                                                  }});
                 return paths;
               },
               true});
  v.push_back({"NC-E1", "S_{alpha,0} vs X sqrt(S_{alpha/2,1}) (false: missing factor 2)",
               TestKind::KS2, {P{{"alpha", 1.2}}},
               [](const P& p) {
                 const double a = need(p, "NC-E1", "alpha");
                 IdentityPaths paths;
                 paths.baseline_name = "S_{alpha,0}";
                 paths.baseline = [=](RandomState& g) { return S0(a, g); };
                 paths.representations.push_back(
                     {"X sqrt(S_{alpha/2,1})", [=](RandomState& g) {
                        return standard_normal(g) * std::sqrt(S1(a / 2.0, g));
                      }});
                 return paths;
               },
               true});
  return v;
}

// Draws of N_{r,alpha,n^{-alpha}} conditioned on N >= 1.
std::int64_t positive_gnb(const GNBParams& p, RandomState& g) {
  for (;;) {
    const auto n = sample_gnb(p, g);
    if (n >= 1) return n;
  }
}

std::vector<ConvergenceSpec> build_convergence() {
  std::vector<ConvergenceSpec> v;

  {
    const double r = 0.5, a = 0.5;
    ConvergenceSpec s;
    s.id = "C-T3";
    s.statement = "mu^{1/alpha} N_{r,alpha,mu} -> G*_{r,alpha,1} as mu -> 0";
    s.scheme = "GNB-scaling";
    s.grid = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    s.params = {{"r", r}, {"alpha", a}};
    s.test = TestKind::KS1;
    s.draw_finite = [=](double mu, RandomState& g) {
      return std::pow(mu, 1.0 / a) * static_cast<double>(sample_gnb({r, a, mu}, g));
    };
    s.limit_cdf = [=](double x) { return gg_cdf({r, a, 1.0}, x); };
    s.note = "the atom P(N=0) ~ mu^r / Gamma(r+1) bounds the distance from below";
    v.push_back(std::move(s));
  }
  {
    const double r = 0.5, a = 0.5;
    ConvergenceSpec s;
    s.id = "C-C1";
    s.statement = "mu^{-1/alpha} Y_{r,alpha,mu} -> S_{alpha,1} Z_{r,1}^{1/alpha} as mu -> 0";
    s.scheme = "GNB-scaling";
    s.grid = {1e-1, 1e-2, 1e-3, 1e-4};
    s.params = {{"r", r}, {"alpha", a}};
    s.test = TestKind::KS2;
    s.draw_finite = [=](double mu, RandomState& g) {
      return std::pow(mu, -1.0 / a) * sample_success_prob({r, a, mu}, g);
    };
    s.draw_limit = [=](RandomState& g) {
      return S1(a, g) * std::pow(Zr(r, g), 1.0 / a);
    };
    v.push_back(std::move(s));
  }
  {
    const double r = 1.5, ap = 0.8;
    ConvergenceSpec s;
    s.id = "C-T5";
    s.statement = "Sigma_{N_{r,alpha',n^{-alpha'}}} / n -> G*_{r,alpha',1} for mean-one summands";
    s.scheme = "random-sum";
    s.grid = {10, 100, 1000, 10000};
    s.params = {{"r", r}, {"alpha_prime", ap}};
    s.test = TestKind::KS1;
    s.draw_finite = [=](double n, RandomState& g) {
      return sample_random_sum({SummandKind::Exponential, 1.0, r, ap},
                               static_cast<std::int64_t>(n), g);
    };
    s.limit_cdf = [=](double x) { return gg_cdf({r, ap, 1.0}, x); };
    v.push_back(std::move(s));
  }
  {
    const double r = 1.5, a = 0.6, ap = 0.8;
    ConvergenceSpec s;
    s.id = "C-T6";
    s.statement = "n^{-1/alpha} Sigma_N -> A(.; r, alpha, alpha') for S_{alpha,1} summands";
    s.scheme = "random-sum";
    s.grid = {10, 100, 1000, 10000};
    s.params = {{"r", r}, {"alpha", a}, {"alpha_prime", ap}};
    s.test = TestKind::KS2;
    s.draw_finite = [=](double n, RandomState& g) {
      return sample_random_sum({SummandKind::OneSidedStable, a, r, ap},
                               static_cast<std::int64_t>(n), g);
    };
    s.draw_limit = [=](RandomState& g) { return sample_a({r, a, ap}, g); };
    v.push_back(std::move(s));
  }
  {
    const double r = 1.5, a = 1.2, ap = 0.8;
    ConvergenceSpec s;
    s.id = "C-T7";
    s.statement = "n^{-1/alpha} Sigma_N -> H(.; r, alpha, alpha') for S_{alpha,0} summands";
    s.scheme = "random-sum";
    s.grid = {10, 100, 1000, 10000};
    s.params = {{"r", r}, {"alpha", a}, {"alpha_prime", ap}};
    s.test = TestKind::KS2;
    s.draw_finite = [=](double n, RandomState& g) {
      return sample_random_sum({SummandKind::SymmetricStable, a, r, ap},
                               static_cast<std::int64_t>(n), g);
    };
    s.draw_limit = [=](RandomState& g) { return sample_h({r, a, ap}, g); };
    v.push_back(std::move(s));
  }
  {
    const double r = 1.5, a = 1.0;
    ConvergenceSpec s;
    s.id = "C-T8";
    s.statement = "Sigma_{N_{r,alpha,n^{-alpha}}} / (sigma sqrt(n)) -> X sqrt(G*_{r,alpha,1})";
    s.scheme = "random-sum";
    s.grid = {10, 100, 1000, 10000};
    s.params = {{"r", r}, {"alpha", a}};
    s.test = TestKind::KS1;
    s.draw_finite = [=](double n, RandomState& g) {
      return sample_random_sum({SummandKind::CenteredExponential, 1.0, r, a},
                               static_cast<std::int64_t>(n), g);
    };
    s.limit_cdf = [=](double x) { return gvg_cdf({r, a, 1.0}, x); };
    s.note = "limit scale mu = 1";
    v.push_back(std::move(s));
  }
  {
    // The distance decays like m^{-alpha r} (the tail of Z_{r,1}^{1/alpha}),
    // so r and alpha sit near 1 to reach the limit within the grid.
    const double r = 0.9, a = 0.8;
    ConvergenceSpec s;
    s.id = "C-C3";
    s.statement = "Y_{r,alpha,m^{-alpha}}-mixed binomial(m) -> mixed Poisson(S_{alpha,1} Z_{r,1}^{1/alpha})";
    s.scheme = "mixed-binomial";
    s.grid = {1e2, 1e3, 1e4};
    s.params = {{"r", r}, {"alpha", a}};
    s.test = TestKind::CHI2;
    s.draw_finite = [=](double m, RandomState& g) {
      const MixedGeomParams y{r, a, std::pow(m, -a)};
      return static_cast<double>(sample_mixed_binomial(static_cast<std::int64_t>(m), y, g));
    };
    s.draw_limit = [=](RandomState& g) {
      const double z = S1(a, g) * std::pow(Zr(r, g), 1.0 / a);
      return static_cast<double>(sample_poisson(z, g));
    };
    v.push_back(std::move(s));
  }
  {
    const double r = 1.5, a = 1.0;
    ConvergenceSpec s;
    s.id = "C-T9";
    s.statement =
        "sqrt(n)(U_N - 1) -> X sqrt(G*_{r,-alpha,1}) for the mean of N exponential observations";
    s.scheme = "random-size-statistic";
    s.grid = {10, 100, 1000, 10000};
    s.params = {{"r", r}, {"alpha", a}};
    s.test = TestKind::KS1;
    s.draw_finite = [=](double n, RandomState& g) {
      const GNBParams idx{r, a, std::pow(n, -a)};
      const double count = static_cast<double>(positive_gnb(idx, g));
      const double mean = sample_gamma(count, 1.0, g) / count;
      return std::sqrt(n) * (mean - 1.0);
    };
    s.limit_cdf = [=](double x) { return gvg_cdf({r, -a, 1.0}, x); };
    s.note = "limit scale mu = 1; U_N is taken conditionally on N >= 1";
    v.push_back(std::move(s));
  }
  return v;
}

constexpr double kolmogorov_sd() {
  // sqrt(pi^2/12 - (pi/2) ln^2 2)
  return 0.26030;
}

}  // namespace

const std::vector<IdentitySpec>& identity_registry() {
  static const std::vector<IdentitySpec> registry = build_identities();
  return registry;
}

const IdentitySpec& find_identity(const std::string& id) {
  for (const auto& e : identity_registry()) {
    if (e.id == id) return e;
  }
  throw ConfigError("unknown identity id '" + id + "'");
}

std::vector<IdentityReport> run_identity(const IdentitySpec& spec, const LawParams& point,
                                         std::int64_t n, std::uint64_t seed, double level) {
  if (n < 10000) throw ConfigError("run_identity: n must be at least 10^4");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("run_identity: level must lie in (0, 1)");
  const IdentityPaths paths = spec.bind(point);
  const std::string label = format_params(point);
  const std::string base_key = spec.id + "|" + label + "|";
  const auto baseline = draw_n(paths.baseline, n, stream_for(seed, base_key + paths.baseline_name));

  IdentityReport proto;
  proto.id = spec.id;
  proto.statement = spec.statement;
  proto.params = point;
  proto.test = spec.test;
  proto.n = n;
  proto.seed = seed;
  proto.negative_control = spec.negative_control;

  std::vector<IdentityReport> out;
  if (spec.test == TestKind::KS1) {
    IdentityReport rep = proto;
    rep.comparison = paths.baseline_name + " vs CDF";
    const auto t = ks_one_sample(baseline, paths.cdf);
    rep.statistic = t.statistic;
    rep.p_value = t.p_value;
    rep.threshold = ks_critical(level, t.df);
    rep.passed = rep.statistic < rep.threshold;
    out.push_back(rep);
    return out;
  }
  for (const auto& [name, drawer] : paths.representations) {
    IdentityReport rep = proto;
    rep.comparison = paths.baseline_name + " vs " + name;
    const auto other = draw_n(drawer, n, stream_for(seed, base_key + name));
    if (spec.test == TestKind::KS2) {
      const auto t = ks_two_sample(baseline, other);
      rep.statistic = t.statistic;
      rep.p_value = t.p_value;
      rep.threshold = ks_critical(level, t.df);
    } else {
      const auto t = chi2_homogeneity(as_counts(baseline), as_counts(other));
      rep.statistic = t.statistic;
      rep.p_value = t.p_value;
      rep.threshold = chi2_isf(level, t.df);
    }
    rep.passed = rep.statistic < rep.threshold;
    out.push_back(rep);
  }
  return out;
}

const std::vector<ConvergenceSpec>& convergence_registry() {
  static const std::vector<ConvergenceSpec> registry = build_convergence();
  return registry;
}

const ConvergenceSpec& find_convergence(const std::string& id) {
  for (const auto& e : convergence_registry()) {
    if (e.id == id) return e;
  }
  throw ConfigError("unknown convergence id '" + id + "'");
}

double ks_std_error(double n_eff) { return kolmogorov_sd() / std::sqrt(n_eff); }

ConvergenceReport run_convergence(const ConvergenceSpec& spec, std::int64_t n_per_point,
                                  std::uint64_t seed, double level) {
  if (spec.grid.size() < 2) throw ConfigError(spec.id + ": grid needs at least two points");
  if (n_per_point < 100) throw ConfigError(spec.id + ": n_per_point must be at least 100");
  ConvergenceReport rep;
  rep.id = spec.id;
  rep.statement = spec.statement;
  rep.scheme = spec.scheme;
  rep.params = spec.params;
  rep.n = n_per_point;
  rep.seed = seed;
  rep.note = spec.note;

  std::vector<double> limit;
  if (spec.test != TestKind::KS1) {
    limit = draw_n(spec.draw_limit, n_per_point, stream_for(seed, spec.id + "|limit"));
  }
  std::vector<double> finite;
  for (double gv : spec.grid) {
    // Every grid point reuses the same stream, so Monte Carlo noise is
    // largely shared along the grid and the trend stands out.
    RandomState rng = stream_for(seed, spec.id + "|finite");
    finite.resize(static_cast<std::size_t>(n_per_point));
    for (auto& x : finite) x = spec.draw_finite(gv, rng);
    ConvergenceRow row;
    row.grid_value = gv;
    if (spec.test == TestKind::KS1) {
      const auto t = ks_one_sample(finite, spec.limit_cdf);
      row.ks_distance = t.statistic;
      row.std_error = ks_std_error(t.df);
    } else {
      const auto t = ks_two_sample(finite, limit);
      row.ks_distance = t.statistic;
      row.std_error = ks_std_error(t.df);
    }
    rep.rows.push_back(row);
  }
  rep.monotone = true;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i];
    const auto& b = rep.rows[i + 1];
    const double pooled = std::hypot(a.std_error, b.std_error);
    if (b.ks_distance > a.ks_distance + 2.0 * pooled) rep.monotone = false;
  }
  if (spec.test == TestKind::CHI2) {
    const auto t = chi2_homogeneity(as_counts(finite), as_counts(limit));
    rep.final_p_value = t.p_value;
  }
  rep.passed = rep.monotone && rep.rows.back().ks_distance < rep.final_threshold &&
               (!rep.final_p_value || *rep.final_p_value > level);
  return rep;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_number(const std::string& text, std::size_t line, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a number, got '" +
                      text + "'");
  }
}

std::vector<std::string> expand_ids(const std::string& value, bool identities) {
  std::vector<std::string> ids;
  for (const auto& tok : split(value, ',')) {
    if (tok == "all") {
      if (identities) {
        for (const auto& e : identity_registry()) {
          if (!e.negative_control) ids.push_back(e.id);
        }
      } else {
        for (const auto& e : convergence_registry()) ids.push_back(e.id);
      }
    } else if (tok == "none") {
      continue;
    } else {
      if (identities) {
        find_identity(tok);
      } else {
        find_convergence(tok);
      }
      ids.push_back(tok);
    }
  }
  return ids;
}

}  // namespace

SuiteConfig parse_suite_config(std::istream& in) {
  SuiteConfig cfg;
  std::string raw;
  std::size_t line = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    try {
      if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
      } else if (key == "n") {
        cfg.n = static_cast<std::int64_t>(parse_number(value, line, key));
      } else if (key == "n_convergence") {
        cfg.n_convergence = static_cast<std::int64_t>(parse_number(value, line, key));
      } else if (key == "level") {
        cfg.level = parse_number(value, line, key);
        if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError("level must lie in (0, 1)");
      } else if (key == "identities") {
        cfg.identities = expand_ids(value, true);
      } else if (key == "convergence") {
        cfg.convergence = expand_ids(value, false);
      } else if (key == "json") {
        cfg.json_path = value;
      } else if (key == "csv") {
        cfg.csv_path = value;
      } else if (key == "threads") {
        cfg.threads = static_cast<int>(parse_number(value, line, key));
      } else if (key.rfind("points.", 0) == 0) {
        const std::string id = key.substr(7);
        find_identity(id);
        std::vector<LawParams> pts;
        for (const auto& item : split(value, ';')) {
          LawParams p;
          for (const auto& kv : split(item, ',')) {
            const auto e2 = kv.find('=');
            if (e2 == std::string::npos) throw ConfigError("point entries are name=value");
            const std::string name = trim(kv.substr(0, e2));
            p[name] = parse_number(trim(kv.substr(e2 + 1)), line, name);
          }
          pts.push_back(std::move(p));
        }
        cfg.points.emplace_back(id, std::move(pts));
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) throw;
      throw ConfigError("line " + std::to_string(line) + ": " + msg);
    } catch (const std::logic_error&) {
      throw ConfigError("line " + std::to_string(line) + ": bad value for '" + key + "'");
    }
  }
  return cfg;
}

SuiteConfig load_suite_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_suite_config(in);
}

std::size_t SuiteReport::passed_count() const {
  std::size_t k = 0;
  for (const auto& r : identities) k += r.passed;
  for (const auto& r : convergence) k += r.passed;
  return k;
}

std::size_t SuiteReport::failed_count() const {
  return identities.size() + convergence.size() - passed_count();
}

bool SuiteReport::all_passed() const { return failed_count() == 0; }

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("GNBLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

SuiteReport run_suite(const SuiteConfig& config) {
  SuiteReport report;
  report.config = config;

  struct IdentityTask {
    const IdentitySpec* spec;
    LawParams point;
  };
  std::vector<IdentityTask> id_tasks;
  std::size_t comparisons = 0;
  for (const auto& id : config.identities) {
    const auto& spec = find_identity(id);
    std::vector<LawParams> pts = spec.default_points;
    for (const auto& [pid, override_pts] : config.points) {
      if (pid == id) pts = override_pts;
    }
    for (const auto& p : pts) {
      const auto paths = spec.bind(p);  // validates the point up front
      comparisons += spec.test == TestKind::KS1 ? 1 : paths.representations.size();
      id_tasks.push_back({&spec, p});
    }
  }
  report.comparison_level = config.level / static_cast<double>(std::max<std::size_t>(comparisons, 1));

  const std::size_t total = id_tasks.size() + config.convergence.size();
  std::vector<std::vector<IdentityReport>> id_results(id_tasks.size());
  std::vector<ConvergenceReport> conv_results(config.convergence.size());
  std::vector<std::exception_ptr> errors(total);

  auto run_task = [&](std::size_t i) {
    try {
      if (i < id_tasks.size()) {
        const auto& t = id_tasks[i];
        id_results[i] = run_identity(*t.spec, t.point, config.n, config.seed, report.comparison_level);
      } else {
        const std::size_t j = i - id_tasks.size();
        conv_results[j] = run_convergence(find_convergence(config.convergence[j]),
                                          config.n_convergence, config.seed, config.level);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  report.workers = static_cast<int>(std::min<std::size_t>(resolve_threads(config.threads),
                                                          std::max<std::size_t>(total, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) run_task(i);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < report.workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (auto& r : id_results) {
    report.identities.insert(report.identities.end(), r.begin(), r.end());
  }
  report.convergence = std::move(conv_results);

  if (!config.json_path.empty()) {
    std::ofstream os(config.json_path);
    if (!os) throw ConfigError("cannot write '" + config.json_path + "'");
    write_json(os, report);
  }
  if (!config.csv_path.empty()) {
    std::ofstream os(config.csv_path);
    if (!os) throw ConfigError("cannot write '" + config.csv_path + "'");
    write_csv(os, report);
  }
  return report;
}

void write_json(std::ostream& os, const SuiteReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = 1;
  j["tool"] = "gnblab";
  j["version"] = version;
  j["seed"] = report.config.seed;
  j["n"] = report.config.n;
  j["n_convergence"] = report.config.n_convergence;
  j["level"] = report.config.level;
  j["comparison_level"] = report.comparison_level;
  j["workers"] = report.workers;
  ordered_json ids = ordered_json::array();
  for (const auto& r : report.identities) {
    ordered_json e;
    e["id"] = r.id;
    e["statement"] = r.statement;
    e["comparison"] = r.comparison;
    e["params"] = r.params;
    e["test"] = to_string(r.test);
    e["n"] = r.n;
    e["seed"] = r.seed;
    e["statistic"] = r.statistic;
    e["p_value"] = r.p_value;
    e["threshold"] = r.threshold;
    e["passed"] = r.passed;
    e["negative_control"] = r.negative_control;
    ids.push_back(std::move(e));
  }
  j["identities"] = std::move(ids);
  ordered_json conv = ordered_json::array();
  for (const auto& r : report.convergence) {
    ordered_json e;
    e["id"] = r.id;
    e["statement"] = r.statement;
    e["scheme"] = r.scheme;
    e["params"] = r.params;
    e["n"] = r.n;
    e["seed"] = r.seed;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
      rows.push_back({{"grid", row.grid_value},
                      {"ks_distance", row.ks_distance},
                      {"std_error", row.std_error}});
    }
    e["rows"] = std::move(rows);
    e["monotone"] = r.monotone;
    e["final_threshold"] = r.final_threshold;
    if (r.final_p_value) e["final_p_value"] = *r.final_p_value;
    e["passed"] = r.passed;
    if (!r.note.empty()) e["note"] = r.note;
    conv.push_back(std::move(e));
  }
  j["convergence"] = std::move(conv);
  j["summary"] = {{"passed", report.passed_count()},
                  {"failed", report.failed_count()},
                  {"all_passed", report.all_passed()}};
  os << j.dump(2) << '\n';
}

void write_csv(std::ostream& os, const SuiteReport& report) {
  os << metadata_line("verify", "suite", "n=" + std::to_string(report.config.n),
                      report.config.seed)
     << '\n';
  os << "kind,id,comparison,params,n,seed,statistic,threshold,passed\n";
  char num[64];
  auto fmt = [&](double v) {
    std::snprintf(num, sizeof num, "%.17g", v);
    return std::string(num);
  };
  auto quoted = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) out += (c == '"' ? std::string("\"\"") : std::string(1, c));
    return out + "\"";
  };
  for (const auto& r : report.identities) {
    os << "identity," << r.id << ',' << quoted(r.comparison) << ',' << quoted(format_params(r.params))
       << ',' << r.n << ',' << r.seed << ',' << fmt(r.statistic) << ',' << fmt(r.threshold) << ','
       << (r.passed ? "true" : "false") << '\n';
  }
  for (const auto& r : report.convergence) {
    os << "convergence," << r.id << ',' << quoted(r.scheme) << ',' << quoted(format_params(r.params))
       << ',' << r.n << ',' << r.seed << ',' << fmt(r.rows.back().ks_distance) << ','
       << fmt(r.final_threshold) << ',' << (r.passed ? "true" : "false") << '\n';
  }
}

}  // namespace gnblab
