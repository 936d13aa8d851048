#pragma once

#include <stdexcept>
#include <string>

namespace asgard {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Vector or operator dimensions do not match.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// A numeric argument lies outside its admissible range.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// The requested (function, scaling) combination has no closed-form support.
class CapabilityError : public Error {
public:
  using Error::Error;
};

/// An iterative estimate did not converge. Carries the last estimate.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string &what, double last_estimate)
      : Error(what), last_estimate_(last_estimate) {}

  double last_estimate() const noexcept { return last_estimate_; }

private:
  double last_estimate_;
};

/// The backtracking loop exceeded its trial budget.
class LineSearchError : public Error {
public:
  using Error::Error;
};

void require_same_size(std::size_t got, std::size_t expected, const char *what);

} // namespace asgard
