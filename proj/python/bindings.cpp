// Thin pybind11 layer over the C++ library. Parameters are passed as plain
// floats; errors surface as ValueError / RuntimeError subclasses.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "gnblab/distributions.hpp"
#include "gnblab/errors.hpp"
#include "gnblab/estimate.hpp"
#include "gnblab/limits.hpp"
#include "gnblab/samplers.hpp"
#include "gnblab/stable.hpp"
#include "gnblab/verify.hpp"
#include "gnblab/version.hpp"

namespace py = pybind11;
using namespace gnblab;

namespace {

py::dict fit_to_dict(const FitResult& fit) {
  py::dict d;
  d["family"] = to_string(fit.family);
  d["params"] = fit.params;
  d["log_likelihood"] = fit.log_likelihood;
  d["l1_distance"] = fit.l1_distance;
  d["iterations"] = fit.iterations;
  d["converged"] = fit.converged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gnblab, m) {
  m.attr("__version__") = version;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DegenerateDataError>(m, "DegenerateDataError", PyExc_ValueError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("stable_pdf", [](double alpha, double theta, double x) {
    return stable_pdf({alpha, theta}, x);
  }, py::arg("alpha"), py::arg("theta"), py::arg("x"));
  m.def("stable_cdf", [](double alpha, double theta, double x) {
    return stable_cdf({alpha, theta}, x);
  }, py::arg("alpha"), py::arg("theta"), py::arg("x"));

  m.def("gg_pdf", [](double r, double alpha, double lambda, double x) {
    return gg_pdf({r, alpha, lambda}, x);
  }, py::arg("r"), py::arg("alpha"), py::arg("lam"), py::arg("x"));
  m.def("gg_cdf", [](double r, double alpha, double lambda, double x) {
    return gg_cdf({r, alpha, lambda}, x);
  }, py::arg("r"), py::arg("alpha"), py::arg("lam"), py::arg("x"));

  m.def("gnb_pmf", [](double r, double alpha, double mu, std::int64_t k) {
    return gnb_pmf({r, alpha, mu}, k);
  }, py::arg("r"), py::arg("alpha"), py::arg("mu"), py::arg("k"));
  m.def("gnb_pmf_table", [](double r, double alpha, double mu, std::int64_t k_max) {
    const PmfTable t = gnb_pmf_table({r, alpha, mu}, k_max);
    return py::make_tuple(t.probs, t.tail_mass);
  }, py::arg("r"), py::arg("alpha"), py::arg("mu"), py::arg("k_max"),
     "Returns (probs for 0..k_max, P(N > k_max)).");
  m.def("nb_pmf", [](double r, double p, std::int64_t k) { return nb_pmf({r, p}, k); },
        py::arg("r"), py::arg("p"), py::arg("k"));

  m.def("mittag_leffler_pdf", &mittag_leffler_pdf, py::arg("alpha"), py::arg("x"));
  m.def("linnik_pdf", &linnik_pdf, py::arg("alpha"), py::arg("x"), py::arg("tol") = 1e-10);

  m.def("a_cdf", [](double r, double alpha, double alpha_prime, double x) {
    return a_cdf({r, alpha, alpha_prime}, x);
  }, py::arg("r"), py::arg("alpha"), py::arg("alpha_prime"), py::arg("x"));
  m.def("h_cdf", [](double r, double alpha, double alpha_prime, double x) {
    return h_cdf({r, alpha, alpha_prime}, x);
  }, py::arg("r"), py::arg("alpha"), py::arg("alpha_prime"), py::arg("x"));
  m.def("gvg_cdf", [](double r, double alpha, double mu, double x) {
    return gvg_cdf({r, alpha, mu}, x);
  }, py::arg("r"), py::arg("alpha"), py::arg("mu"), py::arg("x"));

  m.def("laws", [] {
    std::vector<std::string> names;
    for (const auto& info : law_registry()) names.push_back(info.name);
    return names;
  });
  m.def("sample", [](const std::string& law, const LawParams& params, std::size_t count,
                     std::uint64_t seed) {
    py::gil_scoped_release release;
    return draw_batch(law, params, count, seed).values;
  }, py::arg("law"), py::arg("params"), py::arg("count"), py::arg("seed"));

  m.def("fit", [](const std::vector<std::int64_t>& counts, const std::string& family) {
    const CountData data(counts);
    FitResult fit;
    {
      py::gil_scoped_release release;
      fit = parse_family(family) == Family::NB ? fit_nb_mle(data) : fit_gnb_mle(data);
    }
    return fit_to_dict(fit);
  }, py::arg("counts"), py::arg("family") = "gnb");

  m.def("identities", [] {
    std::vector<std::string> ids;
    for (const auto& spec : identity_registry()) ids.push_back(spec.id);
    return ids;
  });
  m.def("run_suite", [](const std::string& config_text) {
    std::istringstream in(config_text);
    const SuiteConfig config = parse_suite_config(in);
    std::ostringstream out;
    {
      py::gil_scoped_release release;
      write_json(out, run_suite(config));
    }
    return out.str();
  }, py::arg("config_text"), "Runs a suite config given as text; returns the JSON report.");
}
