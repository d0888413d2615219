#include "mhn/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "mhn/errors.hpp"

namespace mhn {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void write_outputs(const RunConfig& rc, const RunArtifacts& art, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const Grid& g = art.grid;
  const ContinuationResult& cont = art.cont;

  write_solution_csv(dir + "/solution.csv", g, cont.limit.v, rc.k);
  write_path_json(dir + "/path.json", rc, cont, art.report);
  write_audit_txt(dir + "/audit.txt", art.report);
  write_gnuplot_matrix(dir + "/u.mat", g, cont.final_state.u);

  Eigen::VectorXd residual = cont.final_state.residual;
  write_gnuplot_matrix(dir + "/residual.mat", g, residual);

  Eigen::VectorXd margin(g.n_active());
  margin.setConstant(std::numeric_limits<double>::quiet_NaN());
  std::span<const double> us(cont.final_state.u.data(), std::size_t(cont.final_state.u.size()));
  for (std::size_t i = 0; i < g.interior().size(); ++i) {
    const Spectral sp = spectral(cont.final_state.hessians[i]);
    const auto e = sigma_all(sp.eigs());
    double m = e[1];
    for (int t = 2; t <= rc.k; ++t) m = std::min(m, e[t]);
    margin[g.interior()[i].active] = m;
  }
  write_gnuplot_matrix(dir + "/margin.mat", g, margin);

  if (art.ref_err_inf) {
    std::vector<ConvergenceRow> rows(1);
    rows[0].param = rc.h;
    rows[0].err_inf = *art.ref_err_inf;
    rows[0].c_err = *art.c_err;
    rows[0].c = cont.limit.c;
    write_convergence_csv(dir + "/convergence.csv", "h", rows);
  }
}

}  // namespace

RunArtifacts run_problem(const RunConfig& rc) {
  RunArtifacts art;
  art.grid = build_grid(rc.domain, rc.h);
  if (!art.grid.closure_ok())
    throw GridError("grid too coarse near the boundary (Neumann ray construction failed)");

  const auto alpha_exprs = rc.alphas();
  art.fields = evaluate_fields(art.grid, rc.k, alpha_exprs, rc.phi());
  art.cont = continuation(art.grid, art.fields, rc.sched, rc.initial_scale);

  art.m0 = c0_bound_m0(2, rc.k, art.fields.alpha_sup, art.fields.phi_max_abs,
                       rc.domain.diameter());
  if (rc.audits) {
    for (const EpsPathRecord& rec : art.cont.records)
      art.report.entries.push_back(c0_bound_audit(rec, art.m0));
    art.report.entries.push_back(gradient_bound_audit(art.cont.records, rc.sched.eps0));
    art.report.entries.push_back(hessian_bound_audit(art.cont.records, rc.sched.eps0));
    auto pointwise = pointwise_audits(art.grid, art.fields, art.cont.final_state);
    for (auto& e : pointwise) art.report.entries.push_back(std::move(e));
  } else {
    AuditEntry off;
    off.name = "audits";
    off.status = AuditStatus::Skipped;
    off.detail = "disabled (--no-audit)";
    art.report.entries.push_back(std::move(off));
  }

  if (auto ref = rc.reference()) {
    // compare v against the mean-free manufactured reference on active nodes
    const Grid& g = art.grid;
    Eigen::VectorXd ref_vals(g.n_active());
    for (const InteriorNode& nd : g.interior())
      ref_vals[nd.active] = ref->eval(g.node_point(nd.ix, nd.iy));
    for (const BandNode& bn : g.band()) ref_vals[bn.active] = ref->eval(bn.node);
    ref_vals.array() -= ref_vals.mean();
    ref_vals.array() -= ref_vals.mean();
    art.ref_err_inf = (art.cont.limit.v - ref_vals).lpNorm<Eigen::Infinity>();
    art.c_err = std::abs(art.cont.limit.c - rc.c_ref);
  }
  return art;
}

int run_command(const RunConfig& rc) {
  RunArtifacts art;
  try {
    art = run_problem(rc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ExprError& e) {
    std::cerr << "expression error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const GridError& e) {
    std::cerr << "grid error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const NotAdmissibleError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }

  const std::string dir = rc.out_dir.empty() ? "out" : rc.out_dir;
  write_outputs(rc, art, dir);

  std::cout << "c = " << fmt("%.12g", art.cont.limit.c)
            << "  (records: " << art.cont.records.size()
            << ", final residual " << fmt("%.3e", art.cont.final_state.res_inf) << ")\n";
  if (art.ref_err_inf)
    std::cout << "reference error: |v - v*|_inf = " << fmt("%.6e", *art.ref_err_inf)
              << ", |c - c_ref| = " << fmt("%.6e", *art.c_err) << '\n';
  std::cout << "M0 = " << fmt("%.6g", art.m0) << ", audit "
            << (!rc.audits ? "SKIPPED" : art.report.all_ok() ? "PASS" : "FAIL")
            << ", outputs in " << dir << "/\n";

  if (rc.audits && !art.report.all_ok()) return kExitAudit;
  return kExitOk;
}

int sweep_command(const RunConfig& rc, const std::string& param,
                  const std::vector<double>& values) {
  if (param != "h" && param != "eps_min") {
    std::cerr << "sweep: --param must be h or eps_min\n";
    return kExitConfig;
  }
  if (values.empty()) {
    std::cerr << "sweep: --values must not be empty\n";
    return kExitConfig;
  }

  const std::string dir = rc.out_dir.empty() ? "sweep" : rc.out_dir;
  std::vector<ConvergenceRow> rows;
  bool audits_ok = true;
  for (double val : values) {
    RunConfig one = rc;
    if (param == "h")
      one.h = val;
    else
      one.sched.eps_min = val;
    one.out_dir = dir + "/" + param + "_" + fmt("%g", val);

    RunArtifacts art;
    try {
      art = run_problem(one);
    } catch (const ConfigError& e) {
      std::cerr << "config error at " << param << "=" << fmt("%g", val) << ": " << e.what() << '\n';
      return kExitConfig;
    } catch (const ExprError& e) {
      std::cerr << "expression error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const GridError& e) {
      std::cerr << "grid error at " << param << "=" << fmt("%g", val) << ": " << e.what() << '\n';
      return kExitConfig;
    } catch (const SolverError& e) {
      std::cerr << "solver error at " << param << "=" << fmt("%g", val) << ": " << e.what() << '\n';
      return kExitSolver;
    }
    write_outputs(one, art, one.out_dir);
    audits_ok = audits_ok && (!one.audits || art.report.all_ok());

    ConvergenceRow row;
    row.param = val;
    row.err_inf = art.ref_err_inf.value_or(std::numeric_limits<double>::quiet_NaN());
    row.c_err = art.c_err.value_or(std::numeric_limits<double>::quiet_NaN());
    row.c = art.cont.limit.c;
    rows.push_back(row);
  }

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i - 1].err_inf / rows[i].err_inf;
    const double step = rows[i - 1].param / rows[i].param;
    rows[i].observed_order = (step > 0 && step != 1.0) ? std::log2(ratio) / std::log2(step) : 0.0;
  }

  std::filesystem::create_directories(dir);
  write_convergence_csv(dir + "/sweep.csv", param, rows);

  std::cout << param << "      err_inf        c_err          c              order\n";
  for (const auto& r : rows)
    std::cout << fmt("%-9g", r.param) << fmt("%-15.6e", r.err_inf) << fmt("%-15.6e", r.c_err)
              << fmt("%-15.6e", r.c) << fmt("%-8.3f", r.observed_order) << '\n';
  std::cout << "sweep table in " << dir << "/sweep.csv\n";
  return audits_ok ? kExitOk : kExitAudit;
}

}  // namespace mhn
