#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lfsurv {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested moment does not exist (shape must exceed the moment order).
class MomentUndefined : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An objective could not be evaluated to a finite value.
class NonFiniteObjective : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fitting requires at least one observed failure.
class NoEvents : public std::invalid_argument {
 public:
  NoEvents() : std::invalid_argument("sample contains no observed events") {}
};

class CalibrationInfeasible : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed dataset input. `line()` is 1-based; 0 means no specific line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lfsurv
