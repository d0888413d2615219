#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mhn/solver.hpp"

namespace mhn {

/// One run: domain, coefficient expressions, discretization and schedule.
/// Parsed from a key = value config file (see docs/formats.md). Expression
/// strings are parsed eagerly, so syntax errors surface at ingestion.
struct RunConfig {
  DomainSpec domain;
  int k = 2;
  std::vector<std::string> alpha_src;  // exactly k entries
  std::string phi_src;
  double h = 0;
  EpsSchedule sched;
  bool audits = true;
  std::string out_dir;
  std::optional<std::string> reference_src;  // manufactured u*, optional
  double c_ref = 0.0;
  double initial_scale = 1.0;
  unsigned long seed = 0;  // recorded for sampling utilities

  std::vector<Expr> alphas() const;
  Expr phi() const;
  std::optional<Expr> reference() const;
};

/// Parse config text. Throws ConfigError on schema violations (unknown keys,
/// missing fields, k < 2, solver-grade resolution below 16 nodes across the
/// diameter, bad schedules) and ExprError on malformed expressions.
RunConfig parse_config(const std::string& text);

/// Read and parse a config file.
RunConfig load_config(const std::string& path);

}  // namespace mhn
