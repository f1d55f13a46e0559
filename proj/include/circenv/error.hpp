#pragma once

#include <stdexcept>
#include <string>

namespace circenv {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed DSL or expression text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Evaluation of an expression left the real domain (division by zero,
/// negative sqrt, ...). Carries the parameter value at which it happened.
class EvalError : public Error {
 public:
  EvalError(const std::string& message, double t)
      : Error(message + " at t=" + std::to_string(t)), t_(t) {}

  double t() const noexcept { return t_; }

 private:
  double t_;
};

/// Input violates a geometric requirement (non-unit Gauss map, radius not
/// positive, base point on an excluded locus, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on data that does not satisfy its precondition,
/// e.g. building creators for a family that is not creative.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace circenv
