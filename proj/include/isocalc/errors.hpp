#ifndef ISOCALC_ERRORS_HPP
#define ISOCALC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isocalc {

/// Base class for every error thrown by the library. `kind()` is a stable
/// machine-readable tag; the CLI maps it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Malformed input: bad JSON, wrong shape, unknown catalog name, bad option.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& message) : Error("invalid_input", message) {}
};

/// Unreadable or malformed input file.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error("parse_error", message) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& message) : Error("dimension_mismatch", message) {}
};

/// L_F(A) is not well defined: F takes different values on a block of equal
/// eigenvalues, so the result would depend on the eigenbasis.
class WellDefinednessError : public Error {
 public:
  explicit WellDefinednessError(const std::string& message)
      : Error("well_definedness", message) {}
};

/// Eigensolver non-convergence, NaN/Inf in an evaluation, and similar.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message, int iterations = -1)
      : Error("numerical_failure", message), iterations_(iterations) {}

  /// Iteration budget that was exhausted, or -1 when not applicable.
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// The Jacobian of F^ext does not have the permutation-symmetric block form
/// r I + t 1 on its subblocks, which is necessary for differentiability.
class StructureViolation : public Error {
 public:
  StructureViolation(const std::string& message, int row_block, int col_block, double residual)
      : Error("structure_violation", message),
        row_block_(row_block),
        col_block_(col_block),
        residual_(residual) {}

  int row_block() const noexcept { return row_block_; }
  int col_block() const noexcept { return col_block_; }
  double residual() const noexcept { return residual_; }

 private:
  int row_block_;
  int col_block_;
  double residual_;
};

/// Contour quadrature would run too close to an eigenvalue.
class ContourError : public Error {
 public:
  explicit ContourError(const std::string& message) : Error("ill_conditioned_contour", message) {}
};

}  // namespace isocalc

#endif  // ISOCALC_ERRORS_HPP
