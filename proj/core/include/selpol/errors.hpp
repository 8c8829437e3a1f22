#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selpol {

/// Broad failure category. Maps one-to-one onto CLI exit codes.
enum class ErrorCategory {
  validation = 2,
  computation = 3,
  io = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string kind, const std::string& message)
      : std::runtime_error(message), category_(category), kind_(std::move(kind)) {}

  ErrorCategory category() const noexcept { return category_; }
  /// Machine-readable error name, e.g. "DegenerateTargets".
  const std::string& kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
  std::string kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string kind = "ValidationError")
      : Error(ErrorCategory::validation, std::move(kind), message) {}
};

class ComputationError : public Error {
 public:
  explicit ComputationError(const std::string& message, std::string kind = "ComputationError")
      : Error(ErrorCategory::computation, std::move(kind), message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::io, "IoError", message) {}
};

/// Hilbert space would exceed the configured dimension cap.
class DimensionOverflow : public ValidationError {
 public:
  explicit DimensionOverflow(const std::string& message)
      : ValidationError(message, "DimensionOverflow") {}
};

class EigenSolverFailure : public ComputationError {
 public:
  explicit EigenSolverFailure(const std::string& message)
      : ComputationError(message, "EigenSolverFailure") {}
};

/// Tracked eigenstates do not separate into clean excitation manifolds.
class ManifoldAmbiguity : public ComputationError {
 public:
  explicit ManifoldAmbiguity(const std::string& message)
      : ComputationError(message, "ManifoldAmbiguity") {}
};

/// Two final states have (numerically) linearly dependent response states.
class DegenerateTargets : public ComputationError {
 public:
  DegenerateTargets(const std::string& message, int first, int second)
      : ComputationError(message, "DegenerateTargets"), first_(first), second_(second) {}
  int first() const noexcept { return first_; }
  int second() const noexcept { return second_; }

 private:
  int first_;
  int second_;
};

/// The transformed pencil has other than exactly one positive eigenvalue.
class InertiaViolation : public ComputationError {
 public:
  explicit InertiaViolation(const std::string& message)
      : ComputationError(message, "InertiaViolation") {}
};

class GridCoverage : public ComputationError {
 public:
  explicit GridCoverage(const std::string& message)
      : ComputationError(message, "GridCoverage") {}
};

class InternalConsistency : public ComputationError {
 public:
  explicit InternalConsistency(const std::string& message)
      : ComputationError(message, "InternalConsistency") {}
};

std::string_view category_name(ErrorCategory category) noexcept;

}  // namespace selpol
