#pragma once

#include <stdexcept>
#include <string>

namespace dwlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (sizes, signs, excluded parameter bands).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The input is a degenerate case the operation is undefined for (e.g. the zero state).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A value fell outside the attainable range of a rate function or its inverse.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, double lo, double hi)
      : Error(what + " (attainable interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}
  explicit RangeError(const std::string& what) : Error(what) {}

  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// A solver failed (Newton divergence, singular system).
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// No admissible samples remained in a fitting window.
class EmptyWindow : public Error {
 public:
  using Error::Error;
};

/// A synthetic construction had an empty feasible set.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A theorem pipeline's hypothesis does not hold, so its conclusion is vacuous.
class HypothesisUnmet : public Error {
 public:
  using Error::Error;
};

/// A nonlinear damping law failed validation; carries the witness abscissa.
class InvalidDamping : public Error {
 public:
  InvalidDamping(const std::string& what, double witness)
      : Error(what + " at s=" + std::to_string(witness)), witness_(witness) {}

  double witness() const { return witness_; }

 private:
  double witness_;
};

}  // namespace dwlab
