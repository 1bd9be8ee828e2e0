#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ghg {

/// Base of every error raised for bad input data or numerical trouble.
/// Programming errors (wrong vector length, invalid config) use the
/// standard std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& detail, std::size_t offset)
      : Error(detail + " at offset " + std::to_string(offset)), detail_(detail), offset_(offset) {}
  const std::string& detail() const noexcept { return detail_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string detail_;
  std::size_t offset_;
};

/// Game document does not match the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Two games (or grids) do not share the structure an operation needs.
class StructureMismatch : public Error {
 public:
  using Error::Error;
};

/// A variable was not bound during evaluation.
class EnvError : public Error {
 public:
  using Error::Error;
};

/// Arithmetic outside the domain, e.g. division by zero.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The input does not satisfy the hypothesis an algorithm needs.
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

/// Non-finite state, quadrature failure, singular matrix.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ghg
