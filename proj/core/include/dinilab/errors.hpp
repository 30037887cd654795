/// @file errors.hpp
/// @brief Exception hierarchy shared by every dinilab module.
///
/// The runner maps these onto process exit codes:
///   ValidationError -> 2, NumericFailure (and subclasses) -> 3, IoError -> 4.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dinilab {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain (0, T] of a modulus, or outside a range.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A structural invariant (monotonicity, positivity, ...) was observed to fail.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A computation could not reach a decision within its budget.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to converge; carries the update-norm history.
class NonConvergence : public NumericFailure {
 public:
  NonConvergence(const std::string& what, std::vector<double> history)
      : NumericFailure(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dinilab
