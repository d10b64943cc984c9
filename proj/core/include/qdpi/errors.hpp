#pragma once

#include <stdexcept>
#include <string>

namespace qdpi {

/// Base class for all library errors.  `kind()` is a stable machine-readable
/// tag used by the CLI error objects; `what()` carries the human diagnostic.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

/// Input validation failures (bad shapes, non-states, malformed JSON, ...).
/// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failures (lost convergence, inconsistent cross-checks, ...).
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

struct NotHermitianError : ValidationError {
  explicit NotHermitianError(const std::string& m) : ValidationError("not_hermitian", m) {}
};
struct DimensionMismatchError : ValidationError {
  explicit DimensionMismatchError(const std::string& m) : ValidationError("dimension_mismatch", m) {}
};
struct BadRankError : ValidationError {
  explicit BadRankError(const std::string& m) : ValidationError("bad_rank", m) {}
};
struct NotDensityError : ValidationError {
  explicit NotDensityError(const std::string& m) : ValidationError("not_density", m) {}
};
struct NonFaithfulError : ValidationError {
  explicit NonFaithfulError(const std::string& m) : ValidationError("non_faithful", m) {}
};
struct NotInAlgebraError : ValidationError {
  explicit NotInAlgebraError(const std::string& m) : ValidationError("not_in_algebra", m) {}
};
struct NotInvariantError : ValidationError {
  explicit NotInvariantError(const std::string& m) : ValidationError("not_invariant", m) {}
};
struct BadWeightsError : ValidationError {
  explicit BadWeightsError(const std::string& m) : ValidationError("bad_weights", m) {}
};
struct NotNormalizedError : ValidationError {
  explicit NotNormalizedError(const std::string& m) : ValidationError("not_normalized", m) {}
};
struct BadCellDistributionError : ValidationError {
  explicit BadCellDistributionError(const std::string& m) : ValidationError("bad_cell_distribution", m) {}
};
struct ParseError : ValidationError {
  explicit ParseError(const std::string& m) : ValidationError("parse", m) {}
};
struct IoError : ValidationError {
  explicit IoError(const std::string& m) : ValidationError("io", m) {}
};

struct SingularInputError : NumericalError {
  explicit SingularInputError(const std::string& m) : NumericalError("singular_input", m) {}
};
struct ConvergenceError : NumericalError {
  explicit ConvergenceError(const std::string& m) : NumericalError("convergence", m) {}
};
struct SupportViolationError : NumericalError {
  explicit SupportViolationError(const std::string& m) : NumericalError("support_violation", m) {}
};
struct DegenerateRandomElementError : NumericalError {
  explicit DegenerateRandomElementError(const std::string& m)
      : NumericalError("degenerate_random_element", m) {}
};
struct StructureInconsistencyError : NumericalError {
  explicit StructureInconsistencyError(const std::string& m)
      : NumericalError("structure_inconsistency", m) {}
};

}  // namespace qdpi
