#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "starfv/cli.hpp"
#include "starfv/eigen.hpp"
#include "starfv/lines.hpp"
#include "starfv/montecarlo.hpp"
#include "starfv/multitype.hpp"
#include "starfv/selection.hpp"
#include "starfv/twotype.hpp"
#include "starfv/verify.hpp"

namespace py = pybind11;
using namespace starfv;

namespace {

TwoTypeParams prm(double theta, double p) { return TwoTypeParams(theta, p); }

std::vector<double> collect(std::size_t n, std::uint64_t seed,
                            const std::function<double(RngStream&)>& draw) {
  py::gil_scoped_release release;
  return mc_collect(n, RngStream(seed, 0), draw);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Star-shaped Fleming-Viot process: closed forms, samplers and checks";
  m.attr("__version__") = "0.1.0";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<QuadratureFailure>(m, "QuadratureFailure", PyExc_ArithmeticError);
  py::register_exception<SingularityError>(m, "SingularityError", PyExc_ArithmeticError);
  py::register_exception<DomainEscape>(m, "DomainEscape", PyExc_RuntimeError);
  py::register_exception<SimulationAbort>(m, "SimulationAbort", PyExc_RuntimeError);
  py::register_exception<NoStationaryDistribution>(m, "NoStationaryDistribution",
                                                   PyExc_RuntimeError);

  // two-type process
  m.def("line_kernel", [](double theta, double p, double t) {
    const auto k = twotype::line_kernel(prm(theta, p), t);
    return std::vector<std::vector<double>>{{k(0, 0), k(0, 1)}, {k(1, 0), k(1, 1)}};
  }, py::arg("theta"), py::arg("p"), py::arg("t"));
  m.def("marginal_q", [](double theta, double p, double x, double t) {
    const auto q = twotype::marginal_q(prm(theta, p), x, t);
    return std::pair{q.q1, q.q2};
  }, py::arg("theta"), py::arg("p"), py::arg("x"), py::arg("t"));
  m.def("transition_atom", [](double theta, double p, double x, double t) {
    const MixedLaw law = twotype::transition_law(prm(theta, p), x, t);
    if (law.atoms().empty()) return std::pair{x, 0.0};
    return std::pair{law.atoms()[0].location, law.atoms()[0].mass};
  }, py::arg("theta"), py::arg("p"), py::arg("x"), py::arg("t"),
     "(location, mass) of the atom of xi(t)");
  m.def("transition_mass", [](double theta, double p, double x, double t) {
    return twotype::transition_law(prm(theta, p), x, t).mass();
  }, py::arg("theta"), py::arg("p"), py::arg("x"), py::arg("t"),
     "atom mass plus quadrature of the density pieces");
  m.def("transition_density", [](double theta, double p, double x, double t, double xi) {
    return twotype::transition_density(prm(theta, p), x, t, xi);
  }, py::arg("theta"), py::arg("p"), py::arg("x"), py::arg("t"), py::arg("xi"));
  m.def("stationary_density", [](double theta, double p, double xi) {
    return twotype::stationary_density(prm(theta, p), xi);
  }, py::arg("theta"), py::arg("p"), py::arg("xi"));
  m.def("stationary_cdf", [](double theta, double p, double xi) {
    return twotype::stationary_cdf(prm(theta, p), xi);
  }, py::arg("theta"), py::arg("p"), py::arg("xi"));
  m.def("transition_moment", [](double theta, double p, int n, double x, double t) {
    return twotype::transition_moment(prm(theta, p), n, x, t);
  }, py::arg("theta"), py::arg("p"), py::arg("n"), py::arg("x"), py::arg("t"));
  m.def("transition_raw_moment", [](double theta, double p, int n, double x, double t) {
    return twotype::transition_raw_moment(prm(theta, p), n, x, t);
  }, py::arg("theta"), py::arg("p"), py::arg("n"), py::arg("x"), py::arg("t"));
  m.def("stationary_moment", [](double theta, double p, int n) {
    const auto s = twotype::stationary_moment(prm(theta, p), n);
    return std::pair{s.central, s.raw};
  }, py::arg("theta"), py::arg("p"), py::arg("n"), "(central, raw)");
  m.def("sample_transition", [](double theta, double p, double x, double t, std::size_t n,
                                std::uint64_t seed) {
    const TwoTypeParams pr = prm(theta, p);
    return collect(n, seed, [&](RngStream& r) { return twotype::sample_transition(pr, x, t, r); });
  }, py::arg("theta"), py::arg("p"), py::arg("x"), py::arg("t"), py::arg("n"),
     py::arg("seed") = 42);
  m.def("stationary_sample", [](double theta, double p, std::size_t n, std::uint64_t seed) {
    const TwoTypeParams pr = prm(theta, p);
    return collect(n, seed, [&](RngStream& r) { return twotype::stationary_sample(pr, r); });
  }, py::arg("theta"), py::arg("p"), py::arg("n"), py::arg("seed") = 42);

  // eigenstructure
  m.def("eigenvalue", [](double theta, double p, int n) {
    return eigen::eigenvalue(prm(theta, p), n);
  }, py::arg("theta"), py::arg("p"), py::arg("n"));
  m.def("c_n0", [](double theta, double p, int n) { return eigen::c_n0(prm(theta, p), n); },
        py::arg("theta"), py::arg("p"), py::arg("n"));
  m.def("c_n1", [](double theta, double p, int n) { return eigen::c_n1(prm(theta, p), n); },
        py::arg("theta"), py::arg("p"), py::arg("n"));
  m.def("eigen_poly", [](double theta, double p, int n) {
    return eigen::eigen_poly(prm(theta, p), n).coeffs();
  }, py::arg("theta"), py::arg("p"), py::arg("n"), "coefficients of P_n in powers of (x - p)");
  m.def("expansion_expectation", [](double theta, double p, const std::vector<double>& power_coeffs,
                                    double x, double t) {
    return eigen::expansion_expectation(prm(theta, p),
                                        eigen::PolyRep::from_power_basis(p, power_coeffs), x, t);
  }, py::arg("theta"), py::arg("p"), py::arg("power_coeffs"), py::arg("x"), py::arg("t"),
     "E_x[g(xi(t))] for g(x) = sum_k b_k x^k");

  // line-counting chain
  m.def("an_distribution", [](int n, double theta, double t) {
    return lines::an_distribution(n, theta, t).prob;
  }, py::arg("n"), py::arg("theta"), py::arg("t"));
  m.def("an_distribution_spectral", [](int n, double theta, double t) {
    return lines::an_distribution_spectral(n, theta, t).prob;
  }, py::arg("n"), py::arg("theta"), py::arg("t"));
  m.def("mean_absorption_time", &lines::mean_absorption_time, py::arg("n"), py::arg("theta"));
  m.def("simulate_absorption_times", [](int n, double theta, std::size_t n_mc, std::uint64_t seed) {
    return collect(n_mc, seed,
                   [&](RngStream& r) { return lines::simulate_lines(n, theta, r).absorption_time; });
  }, py::arg("n"), py::arg("theta"), py::arg("n_mc"), py::arg("seed") = 42);

  // multitype
  m.def("pim_line_kernel", [](double theta, const std::vector<double>& p_vec, double t) {
    return multitype::pim_line_kernel(multitype::MultiParams(theta, p_vec), t);
  }, py::arg("theta"), py::arg("p_vec"), py::arg("t"));
  m.def("markov_line_kernel", [](const Eigen::MatrixXd& matrix, double theta, double t) {
    return multitype::markov_line_kernel(multitype::MutationMatrix(matrix), theta, t);
  }, py::arg("matrix"), py::arg("theta"), py::arg("t"));
  m.def("markov_stationary_gamma", [](const Eigen::MatrixXd& matrix) {
    return multitype::markov_stationary_gamma(multitype::MutationMatrix(matrix));
  }, py::arg("matrix"));
  m.def("infinite_sampling_prob", &multitype::infinite_sampling_prob, py::arg("n"), py::arg("j"),
        py::arg("theta"));
  m.def("num_types_dist", &multitype::num_types_dist, py::arg("n"), py::arg("k"), py::arg("theta"));

  // selection
  m.def("selection_roots", [](double theta, double beta, double p) {
    const auto r = selection::roots(theta, beta, p);
    return std::pair{r.r1, r.r2};
  }, py::arg("theta"), py::arg("beta"), py::arg("p"));
  m.def("skeleton_series", [](double theta, double p, double beta) {
    const auto s = selection::skeleton_series(theta, p, beta);
    return std::pair{s.p11, s.p21};
  }, py::arg("theta"), py::arg("p"), py::arg("beta"));
  m.def("skeleton_quadrature", [](double theta, double p, double beta) {
    const auto s = selection::skeleton_quadrature(theta, p, beta);
    return std::pair{s.p11, s.p21};
  }, py::arg("theta"), py::arg("p"), py::arg("beta"));
  m.def("selection_stationary_density", [](double theta, double p, double beta, double xi) {
    return selection::stationary_density(selection::DriftSpec::mutation_selection(theta, p, beta), xi);
  }, py::arg("theta"), py::arg("p"), py::arg("beta"), py::arg("xi"));
  m.def("selection_pi1", [](double theta, double p, double beta) {
    return selection::replacement_stationary(selection::DriftSpec::mutation_selection(theta, p, beta)).pi1;
  }, py::arg("theta"), py::arg("p"), py::arg("beta"));
  m.def("fixation_prob", &selection::fixation_prob, py::arg("beta"), py::arg("x"), py::arg("type"));
  m.def("asg_stationary", &selection::asg_stationary, py::arg("beta"), py::arg("i"));
  m.def("simulate_t_ua", [](int n, double beta, std::size_t n_mc, std::uint64_t seed) {
    return collect(n_mc, seed, [&](RngStream& r) { return selection::asg_simulate(n, beta, r).t_ua; });
  }, py::arg("n"), py::arg("beta"), py::arg("n_mc"), py::arg("seed") = 42);

  // checks and command line
  m.def("verify", [](const std::string& suite, std::uint64_t seed) {
    std::vector<verify::CheckResult> res;
    {
      py::gil_scoped_release release;
      res = verify::run_suite(verify::suite_criteria(suite), seed);
    }
    py::list out;
    for (const auto& r : res) {
      py::dict d;
      d["id"] = r.id;
      d["name"] = r.name;
      d["passed"] = r.passed();
      d["error"] = r.error;
      py::list checks;
      for (const auto& c : r.checks)
        checks.append(py::dict(py::arg("label") = c.label, py::arg("observed") = c.observed,
                               py::arg("limit") = c.limit, py::arg("upper_bound") = c.upper_bound,
                               py::arg("passed") = c.passed()));
      d["checks"] = checks;
      out.append(d);
    }
    return out;
  }, py::arg("suite") = "all", py::arg("seed") = 42);
  m.def("cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int status = cli::run(args, out, err);
    return py::make_tuple(status, out.str(), err.str());
  }, py::arg("args"), "run the command-line tool; returns (status, stdout, stderr)");
}
