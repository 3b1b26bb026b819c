#include "gnblab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnblab/distributions.hpp"
#include "gnblab/errors.hpp"
#include "gnblab/estimate.hpp"
#include "gnblab/limits.hpp"
#include "gnblab/samplers.hpp"
#include "gnblab/verify.hpp"
#include "gnblab/version.hpp"

namespace gnblab::cli {

namespace {

struct Options {
  std::string input;
  std::string family = "gnb";
  std::string law;
  std::optional<double> r, alpha, alpha_prime, mu, p;
  std::vector<std::string> extra;
  std::int64_t n = 1000;
  std::uint64_t seed = 1;
  std::int64_t k_max = 20;
  std::vector<double> beta;
  std::string out;
  std::string config;
  std::string json_path, csv_path;
  int threads = 0;
  bool negative_alpha = false;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double require(const std::optional<double>& v, const char* flag) {
  if (!v) throw ConfigError(std::string("missing required flag ") + flag);
  return *v;
}

// Writes to --out when given, otherwise to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot write '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

LawParams collect_params(const Options& o) {
  LawParams p;
  if (o.r) p["r"] = *o.r;
  if (o.alpha) p["alpha"] = *o.alpha;
  if (o.alpha_prime) p["alpha_prime"] = *o.alpha_prime;
  if (o.mu) p["mu"] = *o.mu;
  if (o.p) p["p"] = *o.p;
  for (const auto& kv : o.extra) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects name=value, got '" + kv + "'");
    try {
      p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("--param expects a number in '" + kv + "'");
    }
  }
  return p;
}

void print_fit_row(std::ostream& out, const FitResult& f) {
  out << to_string(f.family) << "  " << format_params(f.params) << "  loglik=" << fmt(f.log_likelihood)
      << "  L1=" << fmt(f.l1_distance) << "  iterations=" << f.iterations
      << "  converged=" << (f.converged ? "true" : "false") << '\n';
}

int cmd_fit(const Options& o, std::ostream& out) {
  const CountData data = read_counts_file(o.input);
  std::string fam = o.family;
  std::transform(fam.begin(), fam.end(), fam.begin(), [](unsigned char c) { return std::tolower(c); });
  if (fam != "nb" && fam != "gnb" && fam != "both") {
    throw ConfigError("--family must be nb, gnb or both");
  }
  std::vector<FitResult> fits;
  if (fam != "gnb") fits.push_back(fit_nb_mle(data));
  if (fam != "nb") {
    GnbFitOptions opts;
    opts.negative_alpha = o.negative_alpha;
    fits.push_back(fit_gnb_mle(data, opts));
  }

  out << "n=" << data.n() << " mean=" << fmt(data.mean()) << " variance=" << fmt(data.variance())
      << '\n';
  for (const auto& f : fits) print_fit_row(out, f);
  std::optional<double> ratio;
  if (fits.size() == 2 && fits[1].l1_distance > 0.0) {
    ratio = fits[0].l1_distance / fits[1].l1_distance;
    out << "L1 ratio NB/GNB = " << fmt(*ratio) << '\n';
  }

  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["tool"] = "gnblab";
  j["version"] = version;
  j["input"] = o.input;
  j["n"] = data.n();
  j["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : fits) j["fits"].push_back(nlohmann::ordered_json::parse(to_json(f)));
  if (ratio) j["l1_ratio_nb_over_gnb"] = *ratio;
  if (o.out.empty()) {
    out << j.dump() << '\n';
  } else {
    Sink sink(o.out, out);
    *sink << j.dump(2) << '\n';
  }
  const bool ok = std::all_of(fits.begin(), fits.end(), [](const FitResult& f) { return f.converged; });
  return ok ? exit_ok : exit_numerical;
}

int cmd_pmf(const Options& o, std::ostream& out) {
  if (o.k_max < 0) throw ConfigError("--k-max must be nonnegative");
  PmfTable table;
  LawParams params;
  const Family fam = parse_family(o.family);
  if (fam == Family::NB) {
    const NBParams p{require(o.r, "--r"), require(o.p, "--p")};
    table = nb_pmf_table(p, o.k_max);
    params = {{"r", p.r}, {"p", p.p}};
  } else {
    const GNBParams p{require(o.r, "--r"), require(o.alpha, "--alpha"), require(o.mu, "--mu")};
    table = gnb_pmf_table(p, o.k_max);
    params = {{"r", p.r}, {"alpha", p.alpha}, {"mu", p.mu}};
  }
  if (!(table.mass_defect() < 1e-6)) {
    throw QuadratureError("pmf table fails its mass invariant", table.mass_defect(), 1e-6);
  }
  Sink sink(o.out, out);
  *sink << metadata_line("pmf", fam == Family::NB ? "nb" : "gnb", format_params(params), 0) << '\n';
  *sink << "k,pmf,cdf\n";
  double cdf = 0.0;
  for (std::int64_t k = 0; k <= o.k_max; ++k) {
    const double pk = table.probs[static_cast<std::size_t>(k)];
    cdf += pk;
    *sink << k << ',' << fmt(pk) << ',' << fmt(std::min(cdf, 1.0)) << '\n';
  }
  return exit_ok;
}

int cmd_sample(const Options& o, std::ostream& out) {
  if (o.n < 1) throw ConfigError("--n must be positive");
  const auto batch = draw_batch(o.law, collect_params(o), static_cast<std::size_t>(o.n), o.seed);
  Sink sink(o.out, out);
  write_csv(*sink, batch);
  return exit_ok;
}

int cmd_moments(const Options& o, std::ostream& out) {
  if (o.beta.empty()) throw ConfigError("--beta needs at least one value");
  std::string fam = o.family;
  std::transform(fam.begin(), fam.end(), fam.begin(), [](unsigned char c) { return std::tolower(c); });
  std::function<double(double)> moment;
  LawParams params;
  if (fam == "a" || fam == "h") {
    const GammaMixedStableParams p{require(o.r, "--r"), require(o.alpha, "--alpha"),
                                   o.alpha_prime.value_or(1.0)};
    validate(p);
    params = {{"r", p.r}, {"alpha", p.alpha}, {"alpha_prime", p.alpha_prime}};
    if (fam == "a") {
      moment = [p](double b) { return a_moment(p, b); };
    } else {
      moment = [p](double b) { return h_abs_moment(p, b); };
    }
  } else if (fam == "gvg") {
    const GVGParams p{require(o.r, "--r"), require(o.alpha, "--alpha"), o.mu.value_or(1.0)};
    validate(p);
    params = {{"r", p.r}, {"alpha", p.alpha}, {"mu", p.mu}};
    moment = [p](double b) { return gvg_abs_moment(p, b); };
  } else {
    throw ConfigError("--family must be a, h or gvg for moments");
  }
  Sink sink(o.out, out);
  *sink << metadata_line("moments", fam, format_params(params), 0) << '\n';
  *sink << "beta,moment,status\n";
  for (double b : o.beta) {
    try {
      const double m = moment(b);
      *sink << fmt(b) << ',' << fmt(m) << ",ok\n";
    } catch (const DomainError&) {
      *sink << fmt(b) << ",nan,domain_error\n";
    }
  }
  return exit_ok;
}

int cmd_verify(const Options& o, std::ostream& out) {
  SuiteConfig cfg = load_suite_config(o.config);
  if (!o.json_path.empty()) cfg.json_path = o.json_path;
  if (!o.csv_path.empty()) cfg.csv_path = o.csv_path;
  if (o.threads > 0) cfg.threads = o.threads;
  const auto report = run_suite(cfg);
  for (const auto& r : report.identities) {
    out << (r.passed ? "PASS " : "FAIL ") << r.id << " [" << format_params(r.params) << "] "
        << r.comparison << "  " << to_string(r.test) << " stat=" << fmt(r.statistic)
        << " threshold=" << fmt(r.threshold) << (r.negative_control ? "  (negative control)" : "")
        << '\n';
  }
  for (const auto& r : report.convergence) {
    out << (r.passed ? "PASS " : "FAIL ") << r.id << " [" << format_params(r.params) << "] D=";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      out << (i ? "," : "") << fmt(r.rows[i].ks_distance);
    }
    out << " monotone=" << (r.monotone ? "true" : "false");
    if (r.final_p_value) out << " final_p=" << fmt(*r.final_p_value);
    out << '\n';
  }
  out << report.passed_count() << " passed, " << report.failed_count() << " failed\n";
  return report.all_passed() ? exit_ok : exit_numerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gnblab: generalized negative binomial and generalized gamma toolkit", "gnblab"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);
  Options o;

  auto add_params = [&](CLI::App* c) {
    c->add_option("--r", o.r, "shape r");
    c->add_option("--alpha", o.alpha, "exponent alpha");
    c->add_option("--alpha-prime", o.alpha_prime, "mixing exponent alpha'");
    c->add_option("--mu", o.mu, "scale mu");
    c->add_option("--p", o.p, "NB success probability");
  };

  auto* fit = app.add_subcommand("fit", "fit NB and/or GNB to a file of counts");
  fit->add_option("input", o.input, "counts, one per line")->required();
  fit->add_option("--family", o.family, "nb, gnb or both")->capture_default_str();
  fit->add_flag("--negative-alpha", o.negative_alpha, "fit the alpha < 0 branch of GNB");
  fit->add_option("--out", o.out, "write the JSON report here");

  auto* pmf = app.add_subcommand("pmf", "tabulate the NB or GNB pmf");
  pmf->add_option("--family", o.family, "nb or gnb")->capture_default_str();
  add_params(pmf);
  pmf->add_option("--k-max", o.k_max, "largest k")->capture_default_str();
  pmf->add_option("--out", o.out, "output CSV");

  auto* sample = app.add_subcommand("sample", "draw from a registered law");
  sample->add_option("law", o.law, "law name")->required();
  add_params(sample);
  sample->add_option("--param", o.extra, "other parameters as name=value");
  sample->add_option("--n", o.n, "number of draws")->capture_default_str();
  sample->add_option("--seed", o.seed, "seed")->capture_default_str();
  sample->add_option("--out", o.out, "output CSV");

  auto* moments = app.add_subcommand("moments", "fractional moments of the limit laws");
  moments->add_option("--family", o.family, "a, h or gvg")->required();
  add_params(moments);
  moments->add_option("--beta", o.beta, "moment orders")->delimiter(',')->required();
  moments->add_option("--out", o.out, "output CSV");

  auto* verify = app.add_subcommand("verify", "run an identity/convergence suite");
  verify->add_option("--config", o.config, "suite config file")->required();
  verify->add_option("--json", o.json_path, "JSON report path");
  verify->add_option("--csv", o.csv_path, "CSV report path");
  verify->add_option("--threads", o.threads, "worker threads (0: all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << version << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (*fit) return cmd_fit(o, out);
    if (*pmf) return cmd_pmf(o, out);
    if (*sample) return cmd_sample(o, out);
    if (*moments) return cmd_moments(o, out);
    if (*verify) return cmd_verify(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const DegenerateDataError& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_usage;
}

}  // namespace gnblab::cli
