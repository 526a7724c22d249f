#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <etaq/cli_run.hpp>
#include <etaq/errors.hpp>
#include <etaq/eta_operator.hpp>
#include <etaq/expression.hpp>
#include <etaq/spectrum.hpp>
#include <etaq/symfunc.hpp>
#include <etaq/warp.hpp>

namespace py = pybind11;

namespace {

etaq::WarpModel make_warp(const std::string& kind, double lo, double hi) {
  if (kind == "linear") return etaq::WarpModel::linear(lo, hi);
  if (kind == "sine") return etaq::WarpModel::sine(lo, hi);
  if (kind == "hyperbolic") return etaq::WarpModel::hyperbolic(lo, hi);
  throw etaq::input_error("warp kind must be linear, sine, or hyperbolic");
}

}  // namespace

PYBIND11_MODULE(_etaq, m) {
  m.doc() = "sigma_k quotient operators on transformed spectra, with the "
            "geometry and solver toolkit behind the etaq command line";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const etaq::input_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const etaq::index_error& e) {
      PyErr_SetString(PyExc_IndexError, e.what());
    }
  });

  m.def("sigma", [](int k, const Eigen::VectorXd& z) { return etaq::sigma(k, z); },
        py::arg("k"), py::arg("values"),
        "Elementary symmetric polynomial sigma_k of the given values.");

  m.def(
      "cone_contains",
      [](int k, const Eigen::VectorXd& lam, double eps) {
        return etaq::cone_contains(k, lam, eps).contained;
      },
      py::arg("k"), py::arg("lam"), py::arg("eps") = 0.0,
      "Whether lam lies in the Garding cone Gamma_k (all sigma_j > eps).");

  m.def(
      "quotient",
      [](int n, int k, int l, const Eigen::VectorXd& lam) {
        return etaq::quotient(etaq::QuotientOp(n, k, l), lam);
      },
      py::arg("n"), py::arg("k"), py::arg("l"), py::arg("lam"),
      "sigma_k/sigma_l at lam; raises on points outside Gamma_k.");

  m.def(
      "quotient_gradient",
      [](int n, int k, int l, const Eigen::VectorXd& lam) {
        return etaq::quotient_gradient(etaq::QuotientOp(n, k, l), lam);
      },
      py::arg("n"), py::arg("k"), py::arg("l"), py::arg("lam"),
      "Gradient of sigma_k/sigma_l in the entries of lam.");

  m.def(
      "quotient_hessian",
      [](int n, int k, int l, const Eigen::VectorXd& lam) {
        return etaq::quotient_hessian(etaq::QuotientOp(n, k, l), lam);
      },
      py::arg("n"), py::arg("k"), py::arg("l"), py::arg("lam"),
      "Hessian of sigma_k/sigma_l in the entries of lam.");

  m.def(
      "eta_spectrum",
      [](double theta, double mu, const Eigen::VectorXd& kappa) {
        return etaq::eta_eigen(etaq::EtaParams(theta, mu), etaq::Spectrum(kappa)).values();
      },
      py::arg("theta"), py::arg("mu"), py::arg("kappa"),
      "Ascending spectrum of the transform theta*sum(kappa) - mu*kappa_i.");

  m.def(
      "key_lemma_ratio",
      [](int n, int k, int l, double theta, double mu, const Eigen::VectorXd& kappa) {
        const auto r = etaq::key_lemma_ratio(etaq::QuotientOp(n, k, l),
                                             etaq::EtaParams(theta, mu), etaq::Spectrum(kappa));
        py::dict out;
        out["min_ratio"] = r.min_ratio;
        out["second_min_ratio"] = r.second_min_ratio;
        out["f_diag"] = r.f_diag;
        out["kappa_desc"] = r.kappa_desc;
        return out;
      },
      py::arg("n"), py::arg("k"), py::arg("l"), py::arg("theta"), py::arg("mu"),
      py::arg("kappa"),
      "Diagonal-derivative ratios F^ii/sum F^jj paired with kappa descending.");

  m.def(
      "evaluate",
      [](int n, int k, int l, double theta, double mu, const Eigen::MatrixXd& W) {
        const auto ev =
            etaq::evaluate(etaq::QuotientOp(n, k, l), etaq::EtaParams(theta, mu), W);
        py::dict out;
        out["value"] = ev.value;
        out["f_first"] = ev.f_first;
        out["g_first"] = ev.g_first;
        out["lambda"] = ev.lambda.values();
        return out;
      },
      py::arg("n"), py::arg("k"), py::arg("l"), py::arg("theta"), py::arg("mu"), py::arg("W"),
      "Quotient value and derivatives at the transformed symmetric matrix W.");

  m.def(
      "sphere_oracle",
      [](const std::string& warp, double lo, double hi, double r0, int n, int k, int l) {
        return etaq::sphere_oracle(make_warp(warp, lo, hi), r0, etaq::QuotientOp(n, k, l));
      },
      py::arg("warp"), py::arg("lo"), py::arg("hi"), py::arg("r0"), py::arg("n"), py::arg("k"),
      py::arg("l"), "Closed-form quotient value on the geodesic sphere r = r0.");

  m.def(
      "eval_expression",
      [](const std::string& text, py::object x, py::object p, py::object u, py::object r) {
        const etaq::expr::Expression e = etaq::expr::parse_expression(text);
        etaq::expr::EvalContext ctx;
        if (!x.is_none()) ctx.bind_x(x.cast<Eigen::VectorXd>());
        if (!p.is_none()) ctx.bind_p(p.cast<Eigen::VectorXd>());
        if (!u.is_none()) ctx.bind_u(u.cast<double>());
        if (!r.is_none()) ctx.bind_r(r.cast<double>());
        return e.eval(ctx);
      },
      py::arg("text"), py::arg("x") = py::none(), py::arg("p") = py::none(),
      py::arg("u") = py::none(), py::arg("r") = py::none(),
      "Parse and evaluate an expression over x1..xn, p1..pn, u, r.");

  m.def(
      "run_cli", [](const std::vector<std::string>& args) { return etaq::cli::run(args); },
      py::arg("args"),
      "Run an etaq command line in process; returns the exit code "
      "(0 ok, 1 nonconvergence, 2 admissibility, 3 input).");
}
