#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mconn {

/// Syntax or lookup failure while parsing an expression. `offset` is the
/// byte position in the input text where the problem was detected.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation hit a singular operation: division by zero, log/sqrt of an
/// invalid argument, a negative base raised to a non-integer power, or a
/// non-finite intermediate. Carries the offending subexpression.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& message, std::string subexpression)
      : std::runtime_error(message + " in '" + subexpression + "'"),
        subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// A metric evaluated to a numerically singular matrix (|det| below the
/// declared threshold). Never regularized silently.
class SingularMetricError : public std::runtime_error {
 public:
  SingularMetricError(double determinant, double tolerance)
      : std::runtime_error("singular metric: |det| = " + std::to_string(std::abs(determinant)) +
                           " <= " + std::to_string(tolerance)),
        determinant_(determinant) {}

  double determinant() const noexcept { return determinant_; }

 private:
  double determinant_;
};

/// The fiber Hessian of a Lagrangian lost rank at an evaluated point.
class DegenerateLagrangianError : public std::runtime_error {
 public:
  explicit DegenerateLagrangianError(double determinant)
      : std::runtime_error("degenerate Lagrangian: fiber Hessian determinant " +
                           std::to_string(determinant)),
        determinant_(determinant) {}

  double determinant() const noexcept { return determinant_; }

 private:
  double determinant_;
};

/// Problem-definition level failure (bad file, inconsistent fields, bad
/// CLI arguments). Maps to exit code 2 in the command-line tool.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mconn
