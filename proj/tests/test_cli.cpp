#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gnblab/cli.hpp"
#include "gnblab/samplers.hpp"

namespace fs = std::filesystem;
using gnblab::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string s; std::getline(in, s);) v.push_back(s);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gnblab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, PmfGeometricColumn) {
  auto r = call({"pmf", "--family", "gnb", "--r", "1", "--alpha", "1", "--mu", "1", "--k-max", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0].rfind("# gnblab-version=", 0), 0u);
  EXPECT_EQ(rows[1], "k,pmf,cdf");
  for (int k = 0; k <= 10; ++k) {
    std::istringstream row(rows[k + 2]);
    std::string kk, pmf;
    std::getline(row, kk, ',');
    std::getline(row, pmf, ',');
    EXPECT_EQ(std::stoi(kk), k);
    EXPECT_NEAR(std::stod(pmf), std::pow(2.0, -(k + 1)), 1e-12);
  }
}

TEST_F(CliTest, PmfNegativeBinomial) {
  auto r = call({"pmf", "--family", "nb", "--r", "0.85", "--p", "0.5", "--k-max", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(lines(r.out)[2].substr(2)), 0.554785, 1e-6);
  EXPECT_EQ(call({"pmf", "--family", "nb", "--r", "1", "--p", "0.5", "--k-max", "-1"}).code, 1);
  EXPECT_EQ(call({"pmf", "--family", "nb", "--r", "1", "--k-max", "3"}).code, 1);
}

TEST_F(CliTest, SampleIsDeterministic) {
  const auto a = dir_ / "a.csv", b = dir_ / "b.csv";
  ASSERT_EQ(call({"sample", "gnb", "--r", "0.85", "--alpha", "0.917", "--mu", "0.4", "--n", "10",
                  "--seed", "7", "--out", a.string()}).code, 0);
  ASSERT_EQ(call({"sample", "gnb", "--r", "0.85", "--alpha", "0.917", "--mu", "0.4", "--n", "10",
                  "--seed", "7", "--out", b.string()}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(lines(slurp(a)).size(), 11u);
}

TEST_F(CliTest, SampleMittagLefflerMean) {
  auto r = call({"sample", "mittag_leffler", "--alpha", "1", "--n", "1000000", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  double sum = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) sum += std::stod(rows[i]);
  EXPECT_NEAR(sum / (rows.size() - 1), 1.0, 0.005);
}

TEST_F(CliTest, SampleUnknownLaw) {
  auto r = call({"sample", "zipf", "--n", "5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("gnb"), std::string::npos);
}

TEST_F(CliTest, Moments) {
  auto r = call({"moments", "--family", "gvg", "--r", "1", "--alpha", "1", "--mu", "1", "--beta", "0,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1], "beta,moment,status");
  EXPECT_NEAR(std::stod(rows[2].substr(rows[2].find(',') + 1)), 1.0, 1e-12);
  EXPECT_NEAR(std::stod(rows[3].substr(rows[3].find(',') + 1)), 1.0, 1e-12);

  auto a = call({"moments", "--family", "a", "--r", "0.5", "--alpha", "0.5", "--alpha-prime", "1",
                 "--beta", "0,0.25,0.7"});
  ASSERT_EQ(a.code, 0) << a.err;
  auto arows = lines(a.out);
  EXPECT_NE(arows[2].find(",1,ok"), std::string::npos) << arows[2];
  EXPECT_NE(arows[4].find("domain_error"), std::string::npos) << arows[4];

  auto h = call({"moments", "--family", "h", "--r", "1", "--alpha", "1", "--alpha-prime", "1",
                 "--beta", "0"});
  EXPECT_NE(lines(h.out)[2].find(",1,ok"), std::string::npos);
}

TEST_F(CliTest, FitBoth) {
  const auto input = dir_ / "counts.txt";
  {
    gnblab::RandomState rng(5);
    std::ofstream os(input);
    os << "# synthetic\n";
    for (int i = 0; i < 3320; ++i) os << gnblab::sample_gnb({0.85, 0.6, 0.4}, rng) << '\n';
  }
  const auto json_path = dir_ / "fit.json";
  auto r = call({"fit", input.string(), "--family", "both", "--out", json_path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(slurp(json_path));
  ASSERT_EQ(j["fits"].size(), 2u);
  EXPECT_EQ(j["fits"][1]["family"], "GNB");
  EXPECT_TRUE(j["fits"][1]["converged"].get<bool>());
  EXPECT_GT(j["l1_ratio_nb_over_gnb"].get<double>(), 1.0);
}

TEST_F(CliTest, FitErrors) {
  const auto empty = dir_ / "empty.txt";
  std::ofstream(empty).close();
  EXPECT_EQ(call({"fit", empty.string()}).code, 2);
  const auto bad = dir_ / "bad.txt";
  std::ofstream(bad) << "1\n2\nthree\n";
  auto r = call({"fit", bad.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  const auto same = dir_ / "same.txt";
  std::ofstream(same) << "4\n4\n";
  EXPECT_EQ(call({"fit", same.string()}).code, 2);
}

TEST_F(CliTest, VerifyExitCodes) {
  const auto ok = dir_ / "ok.cfg";
  std::ofstream(ok) << "n = 10000\nidentities = T1\nthreads = 1\n";
  const auto json_path = dir_ / "report.json";
  auto r = call({"verify", "--config", ok.string(), "--json", json_path.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS T1"), std::string::npos);
  EXPECT_TRUE(fs::exists(json_path));

  auto nc = call({"verify", "--config", std::string(GNBLAB_CONFIG_DIR) + "/negative_controls.cfg"});
  EXPECT_NE(nc.code, 0);
  EXPECT_NE(nc.out.find("FAIL NC-W"), std::string::npos);

  EXPECT_NE(call({"verify", "--config", (dir_ / "missing.cfg").string()}).code, 0);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  EXPECT_EQ(call({"pmf", "--family", "gnb", "--r", "x"}).code, 1);
  EXPECT_EQ(call({"--help"}).code, 0);
}
