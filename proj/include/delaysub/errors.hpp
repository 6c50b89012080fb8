#pragma once

#include <stdexcept>
#include <string>

namespace delaysub {

/// Argument outside the mathematical domain of an operation (e.g. log_gamma(x <= 0)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative evaluation did not reach its tolerance within its step budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs are mutually inconsistent (length mismatch, non-nested grids, missing provider...).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear solve or time step failed.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, int step = -1)
      : std::runtime_error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace delaysub
