#pragma once

#include <stdexcept>
#include <string>

namespace gfzf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch() : Error("operands live on different grids") {}
};

/// A diagonal operator has a (numerically) zero symbol.
class SingularOperator : public Error {
 public:
  SingularOperator(const std::string& what, long mode, double value)
      : Error(what), mode_(mode), value_(value) {}
  [[nodiscard]] long mode() const noexcept { return mode_; }
  [[nodiscard]] double value() const noexcept { return value_; }

 private:
  long mode_;
  double value_;
};

/// An iterative scalar solve did not converge.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  [[nodiscard]] double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A runtime-checked energy inequality or range invariant fired.
class AssertionFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gfzf
