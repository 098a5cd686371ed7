#pragma once

#include <stdexcept>
#include <string>

namespace mpls {

/// Incompatible operand shapes (row/column/length mismatch).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A stated precondition was violated (non-unit direction, bad parameter).
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of the numerics themselves.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Triangular or otherwise structured solve hit a numerically zero pivot.
struct SingularMatrixError : NumericalError {
  using NumericalError::NumericalError;
};

/// A factorization (Cholesky) could not be completed.
struct FactorizationError : NumericalError {
  using NumericalError::NumericalError;
};

/// An iteration limit was exhausted without meeting its criterion.
struct ConvergenceError : NumericalError {
  using NumericalError::NumericalError;
};

/// CSV input/output failure; message carries file and row/column.
struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace mpls
