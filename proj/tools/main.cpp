#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "mhn/errors.hpp"
#include "mhn/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Solver and verification suite for the Neumann problem of mixed Hessian equations"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string out_dir;
  bool no_audit = false;
  long seed = -1;
  app.add_option("--out", out_dir, "output directory (overrides the config's 'out')");
  app.add_flag("--no-audit", no_audit, "skip the audit checks");
  app.add_option("--seed", seed, "seed for property-test sampling utilities");

  std::string run_cfg;
  CLI::App* run = app.add_subcommand("run", "solve one configured problem");
  run->add_option("config", run_cfg, "config file")->required();

  std::string sweep_cfg, sweep_param = "h";
  std::vector<double> sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "repeat a run over h or eps_min values");
  sweep->add_option("config", sweep_cfg, "config file")->required();
  sweep->add_option("--param", sweep_param, "parameter to sweep: h or eps_min");
  sweep->add_option("--values", sweep_values, "parameter values")->required()->expected(-1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return mhn::kExitConfig;
  }

  try {
    mhn::RunConfig rc = mhn::load_config(run->parsed() ? run_cfg : sweep_cfg);
    if (!out_dir.empty()) rc.out_dir = out_dir;
    if (no_audit) rc.audits = false;
    if (seed >= 0) rc.seed = static_cast<unsigned long>(seed);
    if (run->parsed()) return mhn::run_command(rc);
    return mhn::sweep_command(rc, sweep_param, sweep_values);
  } catch (const mhn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return mhn::kExitConfig;
  } catch (const mhn::ExprError& e) {
    std::cerr << "expression error: " << e.what() << '\n';
    return mhn::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mhn::kExitSolver;
  }
}
