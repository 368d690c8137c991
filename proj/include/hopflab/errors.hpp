#pragma once

#include <stdexcept>
#include <string>

namespace hopflab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A caller-side contract was violated (off-surface point, non-tangent vector, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The metric restricted to some subspace is numerically degenerate.
class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, int deficiency)
      : Error(what + " (rank deficiency " + std::to_string(deficiency) + ")"), deficiency_(deficiency) {}
  int deficiency() const { return deficiency_; }

 private:
  int deficiency_;
};

/// A hypersurface spec is empty or malformed for its signature.
class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics failed (Newton divergence, singular systems, rejection budget).
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// hat_lambda hit the mu = 2 lambda branch.
class ExceptionalCase : public Error {
 public:
  using Error::Error;
};

}  // namespace hopflab
