#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace undec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the operation's domain (non-Hermitian input, damping
/// outside (0,1), index out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed. `line()` is 1-based, 0 when not
/// applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what
                        : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Rotation parameters violate the conditions the free pair needs.
class FreenessConditionError : public DomainError {
 public:
  using DomainError::DomainError;
};
class AxisError : public DomainError {
 public:
  using DomainError::DomainError;
};
class ExactnessError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A PCP instance with no tiles.
class EmptyInstanceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A tile with both sides empty makes every instance trivially solvable.
class DegenerateInstanceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A map handed to the graph explorer failed CPTP certification.
class NotCptpError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A state queried in a reachability graph is not one of its nodes.
class UnknownStateError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An operation received input that breaks its documented precondition
/// (e.g. a cyclic graph where a DAG is required).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace undec
