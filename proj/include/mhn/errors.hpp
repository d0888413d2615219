#pragma once

#include <stdexcept>
#include <string>

namespace mhn {

/// Hessian eigenvalues left the admissibility cone Gamma_k.
class NotAdmissibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base class for failures inside the Newton/continuation driver.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No admissible, residual-decreasing step above the minimum damping factor.
class LineSearchStallError : public SolverError {
 public:
  using SolverError::SolverError;
};

class MaxItersError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Linear solve missed its relative-residual contract.
class LinearSolveError : public SolverError {
 public:
  using SolverError::SolverError;
};

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expression parse or evaluation failure. pos() is the source offset for
/// parse errors, std::string::npos for evaluation-time domain errors.
class ExprError : public std::runtime_error {
 public:
  explicit ExprError(const std::string& msg, std::size_t pos = std::string::npos)
      : std::runtime_error(msg), pos_(pos) {}
  std::size_t pos() const { return pos_; }

 private:
  std::size_t pos_;
};

}  // namespace mhn
