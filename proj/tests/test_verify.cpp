#include <gtest/gtest.h>

#include <cstdlib>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gnblab/errors.hpp"
#include "gnblab/verify.hpp"

using namespace gnblab;

namespace {

SuiteConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_suite_config(in);
}

}  // namespace

TEST(Registry, RequiredIdentitiesPresent) {
  std::set<std::string> ids;
  for (const auto& e : identity_registry()) {
    ids.insert(e.id);
    EXPECT_FALSE(e.statement.empty()) << e.id;
    if (!e.negative_control) EXPECT_GE(e.default_points.size(), 3u) << e.id;
  }
  for (const char* id : {"T1", "T2", "T3chain", "L3", "E6", "E9", "E30chain", "E35chain", "E1", "INV"}) {
    EXPECT_TRUE(ids.count(id)) << id;
  }
  EXPECT_TRUE(find_identity("NC-W").negative_control);
  EXPECT_THROW(find_identity("T99"), ConfigError);
}

TEST(Registry, RequiredConvergenceSchemesPresent) {
  for (const char* id : {"C-T3", "C-C1", "C-T5", "C-T6", "C-T7", "C-T8", "C-C3", "C-T9"}) {
    const auto& spec = find_convergence(id);
    EXPECT_GE(spec.grid.size(), 3u) << id;
  }
  EXPECT_THROW(find_convergence("C-X"), ConfigError);
}

TEST(RunIdentity, T1Passes) {
  const auto& spec = find_identity("T1");
  auto reports = run_identity(spec, {{"r", 0.5}, {"alpha", 0.5}, {"mu", 1.0}}, 100000, 7, 0.01);
  ASSERT_FALSE(reports.empty());
  for (const auto& r : reports) {
    EXPECT_TRUE(r.passed) << r.comparison << " stat=" << r.statistic << " p=" << r.p_value;
    EXPECT_EQ(r.n, 100000);
  }
}

TEST(RunIdentity, MismatchedLawsFail) {
  IdentitySpec spec;
  spec.id = "W1-vs-W2";
  spec.statement = "W_1 = W_2 (false)";
  spec.test = TestKind::KS2;
  spec.bind = [](const LawParams&) {
    IdentityPaths paths;
    paths.baseline_name = "W_1";
    paths.baseline = [](RandomState& g) { return standard_exponential(g); };
    paths.representations.push_back(
        {"W_2", [](RandomState& g) { return std::sqrt(standard_exponential(g)); }});
    return paths;
  };
  auto reports = run_identity(spec, {}, 20000, 1, 0.01);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_FALSE(reports[0].passed);
}

TEST(RunIdentity, NegativeControlsFail) {
  for (const char* id : {"NC-W", "NC-NB", "NC-E1"}) {
    const auto& spec = find_identity(id);
    for (const auto& r : run_identity(spec, spec.default_points.front(), 100000, 3, 0.01)) {
      EXPECT_FALSE(r.passed) << id << " " << r.comparison;
    }
  }
}

TEST(RunIdentity, SeedAddressedDraws) {
  const auto& spec = find_identity("E6");
  auto a = run_identity(spec, spec.default_points.front(), 10000, 11, 0.01);
  auto b = run_identity(spec, spec.default_points.front(), 10000, 11, 0.01);
  auto c = run_identity(spec, spec.default_points.front(), 10000, 12, 0.01);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].statistic, b[i].statistic);
  EXPECT_NE(a[0].statistic, c[0].statistic);
}

TEST(RunConvergence, GnbScalingDecreases) {
  auto rep = run_convergence(find_convergence("C-T3"), 100000, 20240601);
  EXPECT_TRUE(rep.monotone);
  EXPECT_TRUE(rep.passed);
  EXPECT_LT(rep.rows.back().ks_distance, 0.02);
  EXPECT_GT(rep.rows.front().ks_distance, rep.rows.back().ks_distance);
}

TEST(RunConvergence, MixedBinomialHomogeneity) {
  auto rep = run_convergence(find_convergence("C-C3"), 100000, 20240601);
  ASSERT_TRUE(rep.final_p_value.has_value());
  EXPECT_GT(*rep.final_p_value, 0.01);
  EXPECT_TRUE(rep.passed);
}

TEST(RunConvergence, SinglePointGridRejected) {
  auto spec = find_convergence("C-T3");
  spec.grid = {1e-3};
  EXPECT_THROW(run_convergence(spec, 1000, 1), ConfigError);
}

TEST(RunConvergence, StandardError) {
  EXPECT_NEAR(ks_std_error(1e4), 0.0026030, 1e-7);
}

TEST(SuiteConfig, ParsesKeys) {
  auto cfg = parse(
      "# comment\n"
      "seed = 5\n"
      "n = 2000   # trailing\n"
      "level = 0.05\n"
      "identities = T1, E6\n"
      "convergence = none\n"
      "points.T1 = r=0.5,alpha=0.5,mu=1 ; r=2,alpha=1,mu=0.3\n"
      "threads = 2\n");
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.n, 2000);
  EXPECT_DOUBLE_EQ(cfg.level, 0.05);
  EXPECT_EQ(cfg.identities, (std::vector<std::string>{"T1", "E6"}));
  EXPECT_TRUE(cfg.convergence.empty());
  ASSERT_EQ(cfg.points.size(), 1u);
  EXPECT_EQ(cfg.points[0].second.size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.points[0].second[1].at("mu"), 0.3);
  EXPECT_EQ(cfg.threads, 2);
}

TEST(SuiteConfig, AllExcludesNegativeControls) {
  auto cfg = parse("identities = all\nconvergence = all\n");
  for (const auto& id : cfg.identities) EXPECT_FALSE(find_identity(id).negative_control) << id;
  EXPECT_EQ(cfg.convergence.size(), convergence_registry().size());
}

TEST(SuiteConfig, Errors) {
  EXPECT_THROW(parse("identities = T1, BOGUS\n"), ConfigError);
  EXPECT_THROW(parse("seed = 1\nseed = 2\n"), ConfigError);
  EXPECT_THROW(parse("colour = blue\n"), ConfigError);
  EXPECT_THROW(parse("n = many\n"), ConfigError);
  try {
    parse("seed = 1\n\nwhatever\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_suite_config("/nonexistent/suite.cfg"), ConfigError);
}

TEST(SuiteConfig, ShippedConfigsLoad) {
  auto def = load_suite_config(std::string(GNBLAB_CONFIG_DIR) + "/default.cfg");
  EXPECT_GE(def.identities.size(), 10u);
  auto nc = load_suite_config(std::string(GNBLAB_CONFIG_DIR) + "/negative_controls.cfg");
  for (const auto& id : nc.identities) EXPECT_TRUE(find_identity(id).negative_control);
}

TEST(RunSuite, EmptyConfigSucceeds) {
  auto report = run_suite(parse(""));
  EXPECT_TRUE(report.identities.empty());
  EXPECT_TRUE(report.convergence.empty());
  EXPECT_TRUE(report.all_passed());
}

TEST(RunSuite, WorkerCountDoesNotChangeResults) {
  auto cfg = parse("n = 10000\nn_convergence = 10000\nidentities = T1, E9, NC-W\nconvergence = C-T5\n");
  cfg.threads = 1;
  auto one = run_suite(cfg);
  cfg.threads = 3;
  auto three = run_suite(cfg);
  ASSERT_EQ(one.identities.size(), three.identities.size());
  for (std::size_t i = 0; i < one.identities.size(); ++i) {
    EXPECT_EQ(one.identities[i].statistic, three.identities[i].statistic);
    EXPECT_EQ(one.identities[i].passed, three.identities[i].passed);
  }
  EXPECT_EQ(one.all_passed(), three.all_passed());
  EXPECT_FALSE(one.all_passed());  // NC-W is a negative control

  std::ostringstream a, b;
  write_csv(a, one);
  write_csv(b, three);
  EXPECT_EQ(a.str(), b.str());
}

TEST(RunSuite, JsonReport) {
  auto cfg = parse("n = 10000\nidentities = T1\n");
  cfg.threads = 1;
  auto report = run_suite(cfg);
  std::ostringstream os;
  write_json(os, report);
  auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["identities"].size(), report.identities.size());
  EXPECT_EQ(j["summary"]["passed"].get<std::size_t>(), report.passed_count());
  EXPECT_EQ(j["workers"], 1);
}

TEST(Threads, EnvironmentCap) {
  setenv("GNBLAB_THREADS", "1", 1);
  EXPECT_EQ(resolve_threads(8), 1);
  unsetenv("GNBLAB_THREADS");
  EXPECT_EQ(resolve_threads(3), 3);
}
