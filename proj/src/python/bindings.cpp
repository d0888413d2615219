#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mhn/errors.hpp"
#include "mhn/runner.hpp"

namespace py = pybind11;
using namespace mhn;

namespace {

SymMat to_symmat(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols() || (w.rows() != 2 && w.rows() != 3))
    throw std::invalid_argument("matrix must be 2x2 or 3x3");
  const int n = int(w.rows());
  SymMat m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (std::abs(w(i, j) - w(j, i)) > 1e-12 * (1.0 + std::abs(w(i, j))))
        throw std::invalid_argument("matrix is not symmetric");
      m.set(i, j, w(i, j));
    }
  return m;
}

Eigen::MatrixXd from_symmat(const SymMat& m) {
  Eigen::MatrixXd w(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) w(i, j) = m(i, j);
  return w;
}

RunConfig make_config(const std::string& domain, double radius_a, double b, double p,
                      int k, const std::vector<std::string>& alphas, const std::string& phi,
                      double h, double eps0, double eps_ratio, double eps_min,
                      const std::string& reference, double c_ref, double initial_scale,
                      bool audits) {
  RunConfig rc;
  if (domain == "disk")
    rc.domain = DomainSpec::disk(radius_a);
  else if (domain == "ellipse")
    rc.domain = DomainSpec::ellipse(radius_a, b);
  else if (domain == "superellipse")
    rc.domain = DomainSpec::superellipse(radius_a, b, p);
  else
    throw ConfigError("domain must be disk, ellipse or superellipse");
  rc.k = k;
  rc.alpha_src = alphas;
  rc.phi_src = phi;
  rc.h = h;
  rc.sched.eps0 = eps0;
  rc.sched.ratio = eps_ratio;
  rc.sched.eps_min = eps_min;
  if (!reference.empty()) rc.reference_src = reference;
  rc.c_ref = c_ref;
  rc.initial_scale = initial_scale;
  rc.audits = audits;
  return rc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical solver and verification suite for the classical Neumann problem of "
            "mixed Hessian equations sigma_k(D^2 u) = sum_l alpha_l(x) sigma_l(D^2 u).";

  py::register_exception<NotAdmissibleError>(m, "NotAdmissibleError");
  py::register_exception<SolverError>(m, "SolverError");
  py::register_exception<GridError>(m, "GridError");
  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<ExprError>(m, "ExprError");

  // symmetric functions
  m.def("binomial", &binomial, py::arg("n"), py::arg("m"));
  m.def("sigma", [](int mm, const std::vector<double>& lam) { return sigma(mm, lam); },
        py::arg("m"), py::arg("lam"), "Elementary symmetric function sigma_m(lam); sigma_0 = 1.");
  m.def("sigma_del1",
        [](int mm, const std::vector<double>& lam, int i) { return sigma_del1(mm, lam, i); },
        py::arg("m"), py::arg("lam"), py::arg("i"));
  m.def("sigma_del2",
        [](int mm, const std::vector<double>& lam, int i, int j) { return sigma_del2(mm, lam, i, j); },
        py::arg("m"), py::arg("lam"), py::arg("i"), py::arg("j"));
  m.def("in_cone", [](const std::vector<double>& lam, int k) { return in_cone(lam, k); },
        py::arg("lam"), py::arg("k"), "Garding cone test: sigma_i(lam) > 0 for 1 <= i <= k.");
  m.def("in_cone_tol",
        [](const std::vector<double>& lam, int k, double tau) { return in_cone_tol(lam, k, tau); },
        py::arg("lam"), py::arg("k"), py::arg("tau"));
  m.def("newton_maclaurin_ratio",
        [](const std::vector<double>& lam, int mm, int l, int r, int s) {
          const RatioPair p = newton_maclaurin_ratio(lam, mm, l, r, s);
          return py::make_tuple(p.lhs, p.rhs);
        },
        py::arg("lam"), py::arg("m"), py::arg("l"), py::arg("r"), py::arg("s"));

  // pointwise operator
  m.def("spectral",
        [](const Eigen::MatrixXd& w) {
          const Spectral sp = spectral(to_symmat(w));
          Eigen::VectorXd lam(sp.n);
          Eigen::MatrixXd q(sp.n, sp.n);
          for (int i = 0; i < sp.n; ++i) {
            lam[i] = sp.lam[std::size_t(i)];
            for (int j = 0; j < sp.n; ++j) q(i, j) = sp.qv(i, j);
          }
          return py::make_tuple(lam, q);
        },
        py::arg("W"), "Eigen-decomposition (eigenvalues descending, oriented eigenvectors).");
  m.def("g_value",
        [](const Eigen::MatrixXd& w, const std::vector<double>& alpha) {
          return g_value(to_symmat(w), CoeffSample(alpha));
        },
        py::arg("W"), py::arg("alpha"),
        "G(W, x) = sigma_k/sigma_{k-1} - sum alpha_l sigma_l/sigma_{k-1}; the PDE residual "
        "at the point is g_value - alpha[k-1].");
  m.def("g_gradient",
        [](const Eigen::MatrixXd& w, const std::vector<double>& alpha) {
          return from_symmat(g_gradient(to_symmat(w), CoeffSample(alpha)));
        },
        py::arg("W"), py::arg("alpha"));
  m.def("trace_bounds",
        [](const Eigen::MatrixXd& w, const std::vector<double>& alpha) {
          const TraceBounds tb = trace_bounds_check(to_symmat(w), CoeffSample(alpha));
          return py::make_tuple(tb.trace, tb.lower, tb.upper);
        },
        py::arg("W"), py::arg("alpha"));
  m.def("concavity_probe",
        [](const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2, const std::vector<double>& alpha) {
          const ConcavityProbe pr = concavity_probe(to_symmat(w1), to_symmat(w2), CoeffSample(alpha));
          return py::make_tuple(pr.mid, pr.chord);
        },
        py::arg("W1"), py::arg("W2"), py::arg("alpha"));
  m.def("min_eig_derivative_check",
        [](const std::vector<double>& lam, const std::vector<double>& alpha,
           const std::string& mode, double delta, double eps) {
          const MinEigMode mm = (mode == "negative_lambda1") ? MinEigMode::NegativeLambda1
                                                             : MinEigMode::Pinch;
          const DerivativeBound db =
              min_eig_derivative_check(lam, CoeffSample(alpha), mm, delta, eps);
          return py::make_tuple(db.lhs, db.rhs);
        },
        py::arg("lam"), py::arg("alpha"), py::arg("mode") = "negative_lambda1",
        py::arg("delta") = 0.0, py::arg("eps") = 0.0);

  // expressions
  py::class_<Expr>(m, "Expr")
      .def(py::init([](const std::string& src) { return Expr::parse(src); }), py::arg("src"))
      .def("__call__", [](const Expr& e, double x, double y) { return e.eval(x, y); },
           py::arg("x"), py::arg("y") = 0.0)
      .def("__str__", &Expr::to_string);

  // solve results
  py::class_<EpsPathRecord>(m, "EpsPathRecord")
      .def_readonly("eps", &EpsPathRecord::eps)
      .def_readonly("c_est", &EpsPathRecord::c_est)
      .def_readonly("newton_iters", &EpsPathRecord::newton_iters)
      .def_readonly("final_res", &EpsPathRecord::final_res)
      .def_readonly("res_history", &EpsPathRecord::res_history)
      .def_readonly("sup_eps_u", &EpsPathRecord::sup_eps_u)
      .def_readonly("sup_grad", &EpsPathRecord::sup_grad)
      .def_readonly("sup_hess", &EpsPathRecord::sup_hess);

  py::class_<RunArtifacts>(m, "SolveResult")
      .def_property_readonly("c", [](const RunArtifacts& a) { return a.cont.limit.c; })
      .def_property_readonly("records", [](const RunArtifacts& a) { return a.cont.records; })
      .def_property_readonly("v", [](const RunArtifacts& a) { return a.cont.limit.v; })
      .def_property_readonly("audit_pass", [](const RunArtifacts& a) { return a.report.all_ok(); })
      .def_property_readonly("m0", [](const RunArtifacts& a) { return a.m0; })
      .def_property_readonly("ref_err_inf",
                             [](const RunArtifacts& a) -> py::object {
                               return a.ref_err_inf ? py::cast(*a.ref_err_inf) : py::none();
                             })
      .def_property_readonly("c_err", [](const RunArtifacts& a) -> py::object {
        return a.c_err ? py::cast(*a.c_err) : py::none();
      });

  m.def("solve", [](const std::string& domain, double radius, double b, double p, int k,
                    const std::vector<std::string>& alphas, const std::string& phi, double h,
                    double eps0, double eps_ratio, double eps_min, const std::string& reference,
                    double c_ref, double initial_scale, bool audits) {
          return run_problem(make_config(domain, radius, b, p, k, alphas, phi, h, eps0, eps_ratio,
                                         eps_min, reference, c_ref, initial_scale, audits));
        },
        py::arg("domain") = "disk", py::arg("radius") = 1.0, py::arg("b") = 1.0,
        py::arg("p") = 2.0, py::arg("k") = 2, py::arg("alphas") = std::vector<std::string>{},
        py::arg("phi") = "1", py::arg("h") = 0.0625, py::arg("eps0") = 0.1,
        py::arg("eps_ratio") = 0.5, py::arg("eps_min") = 1e-4, py::arg("reference") = "",
        py::arg("c_ref") = 0.0, py::arg("initial_scale") = 1.0, py::arg("audits") = true,
        "Solve one Neumann problem by eps-continuation and return (c, v, records, audits).");

  m.def("run", [](const std::string& config_path, const std::string& out_dir, bool audits,
                  unsigned long seed) {
          RunConfig rc = load_config(config_path);
          if (!out_dir.empty()) rc.out_dir = out_dir;
          if (!audits) rc.audits = false;
          rc.seed = seed;
          return run_command(rc);
        },
        py::arg("config_path"), py::arg("out_dir") = "", py::arg("audits") = true,
        py::arg("seed") = 0ul, "Run a config file exactly like the CLI; returns the exit status.");
}
