#include "mhn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mhn/errors.hpp"

namespace mhn {

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  return out;
}

}  // namespace

void write_solution_csv(const std::string& path, const Grid& g, const Eigen::VectorXd& v, int k) {
  auto out = open_out(path);
  out << "x,y,kind,v,dvx,dvy,grad_norm,h_xx,h_xy,h_yy,lambda_1,lambda_2,cone_margin\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::span<const double> vs(v.data(), std::size_t(v.size()));

  // rows in active-index order: interleave interiors and band nodes row-major
  std::size_t ii = 0, jb = 0;
  for (int idx = 0; idx < g.n_active(); ++idx) {
    const bool is_interior =
        ii < g.interior().size() && g.interior()[ii].active == idx;
    if (is_interior) {
      const InteriorNode& nd = g.interior()[ii++];
      const Point q = g.node_point(nd.ix, nd.iy);
      const Point dv = g.gradient_at(vs, nd);
      const SymMat H = g.hessian_at(vs, nd);
      const Spectral sp = spectral(H);
      const auto e = sigma_all(sp.eigs());
      double margin = e[1];
      for (int t = 2; t <= k; ++t) margin = std::min(margin, e[t]);
      out << g17(q.x) << ',' << g17(q.y) << ",interior," << g17(v[idx]) << ',' << g17(dv.x)
          << ',' << g17(dv.y) << ',' << g17(std::hypot(dv.x, dv.y)) << ',' << g17(H(0, 0)) << ','
          << g17(H(0, 1)) << ',' << g17(H(1, 1)) << ',' << g17(sp.lam[0]) << ',' << g17(sp.lam[1])
          << ',' << g17(margin) << '\n';
    } else {
      const BandNode& bn = g.band()[jb++];
      out << g17(bn.node.x) << ',' << g17(bn.node.y) << ",band," << g17(v[idx]);
      for (int c = 0; c < 9; ++c) out << ',' << g17(nan);
      out << '\n';
    }
  }
}

std::vector<SolutionRow> read_solution_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);  // header
  std::vector<SolutionRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string tok;
    SolutionRow r;
    double* fields[] = {&r.x,   &r.y,   nullptr, &r.v,    &r.dvx,  &r.dvy, &r.grad_norm,
                        &r.hxx, &r.hxy, &r.hyy,  &r.lam1, &r.lam2, &r.cone_margin};
    for (double* f : fields) {
      if (!std::getline(is, tok, ',')) throw std::runtime_error("solution.csv: short row");
      if (f)
        *f = std::strtod(tok.c_str(), nullptr);
      else
        r.kind = tok;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_path_json(const std::string& path, const RunConfig& rc,
                     const ContinuationResult& cont, const AuditReport& report) {
  nlohmann::ordered_json j;
  j["k"] = rc.k;
  j["h"] = rc.h;
  j["seed"] = rc.seed;
  j["records"] = nlohmann::ordered_json::array();
  for (const EpsPathRecord& r : cont.records) {
    nlohmann::ordered_json rec;
    rec["eps"] = r.eps;
    rec["c_est"] = r.c_est;
    rec["newton_iters"] = r.newton_iters;
    rec["final_res"] = r.final_res;
    rec["res_history"] = r.res_history;
    rec["sup_eps_u"] = r.sup_eps_u;
    rec["sup_grad"] = r.sup_grad;
    rec["sup_hess"] = r.sup_hess;
    rec["min_cone_margin"] = r.min_cone_margin;
    j["records"].push_back(std::move(rec));
  }
  j["limit"]["c"] = cont.limit.c;
  j["limit"]["v_mean_abs"] = cont.limit.v_mean_abs;
  j["limit"]["interior_res_max"] = cont.limit.interior_res_max;
  j["limit"]["boundary_res_c_max"] = cont.limit.boundary_res_c_max;
  j["limit"]["c_cauchy"] = cont.limit.c_cauchy;
  j["audit_pass"] = report.all_ok();

  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_audit_txt(const std::string& path, const AuditReport& report) {
  auto out = open_out(path);
  for (const AuditEntry& e : report.entries) {
    const char* tag = e.status == AuditStatus::Pass   ? "PASS"
                      : e.status == AuditStatus::Fail ? "FAIL"
                                                      : "SKIP";
    out << tag << "  " << e.name << "  |  " << e.detail << '\n';
  }
  out << (report.all_ok() ? "ALL-OK\n" : "FAILURES-PRESENT\n");
}

void write_convergence_csv(const std::string& path, const std::string& param_name,
                           const std::vector<ConvergenceRow>& rows) {
  auto out = open_out(path);
  out << param_name << ",err_inf,c_err,c,observed_order\n";
  for (const auto& r : rows)
    out << g17(r.param) << ',' << g17(r.err_inf) << ',' << g17(r.c_err) << ',' << g17(r.c) << ','
        << g17(r.observed_order) << '\n';
}

void write_gnuplot_matrix(const std::string& path, const Grid& g, const Eigen::VectorXd& values) {
  auto out = open_out(path);
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      if (ix) out << ' ';
      const int idx = g.active_index(ix, iy);
      out << (idx >= 0 ? g17(values[idx]) : "nan");
    }
    out << '\n';
  }
}

}  // namespace mhn
