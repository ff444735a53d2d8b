#include "gbcurv/cli.hpp"
#include "gbcurv/functionals.hpp"
#include "gbcurv/invariants.hpp"
#include "gbcurv/verification.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace gbcurv;

namespace {

py::dict report_details(const VerificationReport& r) {
  py::dict d;
  for (const auto& [k, v] : r.details) d[py::str(k)] = v;
  return d;
}

// Runs the command-line driver in-process; returns (exit code, stdout, stderr).
py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> all = {"gbcurv"};
  all.insert(all.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : all) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_gbcurv, m) {
  m.doc() = "Euler forms, their variations and boundary invariants";
  m.attr("__version__") = GBCURV_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<cli::SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<DegenerateMetricError>(m, "DegenerateMetricError", PyExc_ArithmeticError);
  py::register_exception<NotInvariantError>(m, "NotInvariantError", PyExc_ValueError);

  py::class_<Signature>(m, "Signature")
      .def(py::init<std::vector<int>>())
      .def_static("riemannian", &Signature::riemannian)
      .def_static("with_timelike", &Signature::with_timelike)
      .def_property_readonly("dim", &Signature::dim)
      .def_property_readonly("p", &Signature::p)
      .def_property_readonly("q", &Signature::q)
      .def("signs", [](const Signature& s) { return std::vector<int>(s.signs().begin(), s.signs().end()); })
      .def("tangential", &Signature::tangential)
      .def("__repr__", [](const Signature& s) { return "Signature('" + s.to_string() + "')"; })
      .def("__str__", &Signature::to_string);

  py::class_<AlgebraicCurvature>(m, "AlgebraicCurvature")
      .def(py::init<int>())
      .def_property_readonly("dim", &AlgebraicCurvature::dim)
      .def("__call__", [](const AlgebraicCurvature& r, int i, int j, int k, int l) { return r(i, j, k, l); })
      .def("set", &AlgebraicCurvature::set)
      .def("transformed", &AlgebraicCurvature::transformed)
      .def("tangential", &AlgebraicCurvature::tangential)
      .def("bianchi_residual", &AlgebraicCurvature::bianchi_residual)
      .def("max_abs", &AlgebraicCurvature::max_abs);

  m.def("random_curvature", &random_curvature, py::arg("dim"), py::arg("seed"));
  m.def("constant_curvature", &constant_curvature, py::arg("dim"), py::arg("kappa"), py::arg("signs"));
  m.def("random_frame_change", &random_frame_change, py::arg("signs"), py::arg("seed"),
        py::arg("boost_range") = 0.5);
  m.def("sphere_volume", &sphere_volume);

  m.def("euler_form", &euler_form, py::arg("r"), py::arg("signs"), py::arg("n"));
  m.def(
      "interior_el_tensor",
      [](const AlgebraicCurvature& r, const Signature& s, int n) {
        return interior_el_tensor(r, s, n).matrix();
      },
      py::arg("r"), py::arg("signs"), py::arg("n"));
  m.def(
      "boundary_transgression",
      [](const AlgebraicCurvature& r, const Eigen::MatrixXd& l, const Signature& s, int n,
         std::optional<int> nu) { return boundary_transgression(r, SecondFundamentalForm(l), s, n, nu); },
      py::arg("r_tan"), py::arg("L"), py::arg("signs_tan"), py::arg("n"), py::arg("nu") = py::none());
  m.def(
      "boundary_el_tensor",
      [](const AlgebraicCurvature& r, const Eigen::MatrixXd& l, const Signature& s, int n,
         std::optional<int> nu) {
        return boundary_el_tensor(r, SecondFundamentalForm(l), s, n, nu).matrix();
      },
      py::arg("r_tan"), py::arg("L"), py::arg("signs_tan"), py::arg("n"), py::arg("nu") = py::none());

  py::enum_<Criterion>(m, "Criterion")
      .value("Absolute", Criterion::Absolute)
      .value("Relative", Criterion::Relative)
      .value("Witness", Criterion::Witness);

  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("test", &VerificationReport::test)
      .def_readonly("value", &VerificationReport::value)
      .def_readonly("reference", &VerificationReport::reference)
      .def_readonly("abs_err", &VerificationReport::abs_err)
      .def_readonly("rel_err", &VerificationReport::rel_err)
      .def_readonly("tol", &VerificationReport::tol)
      .def_readonly("criterion", &VerificationReport::criterion)
      .def_readonly("passed", &VerificationReport::pass)
      .def_readonly("seconds", &VerificationReport::seconds)
      .def_property_readonly("details", &report_details)
      .def("__repr__", [](const VerificationReport& r) {
        std::ostringstream s;
        cli::print_reports(s, {r});
        return s.str();
      });

  py::class_<MetricChart>(m, "MetricChart")
      .def_property_readonly("name", &MetricChart::name)
      .def_property_readonly("dim", &MetricChart::dim)
      .def_property_readonly("has_boundary", &MetricChart::has_boundary)
      .def("metric_at", [](const MetricChart& c, std::vector<double> x) { return metric_at(c, x); })
      .def("curvature_at", [](const MetricChart& c, std::vector<double> x) {
        return geometry_at(c, x, false).curvature;
      });

  py::class_<cli::ManifoldSpec>(m, "ManifoldSpec")
      .def_readonly("name", &cli::ManifoldSpec::name)
      .def_readonly("dim", &cli::ManifoldSpec::dim)
      .def_readonly("euler_characteristic", &cli::ManifoldSpec::euler_characteristic)
      .def_readonly("quadrature_order", &cli::ManifoldSpec::quadrature_order)
      .def("perturbation_names", [](const cli::ManifoldSpec& s) {
        std::vector<std::string> out;
        for (const auto& [n, p] : s.perturbations) out.push_back(n);
        return out;
      })
      .def("to_json", &cli::spec_to_json)
      .def("chart", &cli::build_chart);

  m.def("parse_spec", &cli::parse_spec);
  m.def("load_spec", &cli::load_spec);

  m.def(
      "gauss_bonnet",
      [](const cli::ManifoldSpec& s, std::optional<int> order, double tol) {
        const auto c = cli::build_chart(s);
        const int o = order.value_or(s.quadrature_order.value_or(16));
        py::gil_scoped_release release;
        return c.has_boundary() ? gauss_bonnet_boundary(c, s.euler_characteristic, o, tol)
                                : gauss_bonnet_closed(c, s.euler_characteristic, o, tol);
      },
      py::arg("spec"), py::arg("order") = py::none(), py::arg("tol") = 1e-6);

  m.def(
      "variational_check",
      [](const cli::ManifoldSpec& s, int n, const std::string& perturbation, int order, double tol,
         double fd_step, bool absolute) {
        const auto c = cli::build_chart(s);
        const auto h = cli::build_perturbation(s, perturbation);
        VariationalOptions opt;
        opt.order = order;
        opt.tol = tol;
        opt.fd_step = fd_step;
        opt.criterion = absolute ? Criterion::Absolute : Criterion::Relative;
        py::gil_scoped_release release;
        return c.has_boundary() ? variational_check_boundary(c, h, n, opt)
                                : variational_check_interior(c, h, n, opt);
      },
      py::arg("spec"), py::arg("n"), py::arg("perturbation") = "", py::arg("order") = 16,
      py::arg("tol") = 1e-4, py::arg("fd_step") = 1e-3, py::arg("absolute") = false);

  m.def(
      "restriction_check",
      [](const cli::ManifoldSpec& s, int sign, int order, double tol) {
        return restriction_product_check(cli::build_chart(s), std::nullopt, sign, order, tol);
      },
      py::arg("spec"), py::arg("sign") = 1, py::arg("order") = 8, py::arg("tol") = 1e-8);

  m.def(
      "identity_check",
      [](int dim, int samples, std::uint64_t seed, double tol, std::optional<Signature> signs) {
        return identity_check(dim, samples, seed, tol, signs);
      },
      py::arg("dim"), py::arg("samples") = 1000, py::arg("seed") = 1, py::arg("tol") = 1e-12,
      py::arg("signs") = py::none());

  m.def(
      "invariant_basis",
      [](int dim, std::optional<Signature> signs) {
        const Signature s = signs.value_or(Signature::riemannian(dim));
        std::vector<std::string> out;
        for (const auto& p : invariant_subspace(dim, s)) out.push_back(p.to_string());
        return out;
      },
      py::arg("dim"), py::arg("signs") = py::none(),
      "Exact basis of the invariant admissible polynomials, one text block per vector.");
  m.def(
      "q_polynomial",
      [](int dim, int k, std::optional<Signature> signs) {
        return q_polynomial(dim, k, signs.value_or(Signature::riemannian(dim))).to_string();
      },
      py::arg("dim"), py::arg("k"), py::arg("signs") = py::none());

  m.def("run", &run_cli, py::arg("args"), "Command-line driver; returns (code, stdout, stderr).");
}
