#pragma once

#include <stdexcept>
#include <string>

namespace kemeny {

/// Broad failure families. The CLI maps these onto process exit codes.
enum class ErrorKind {
  data,     // malformed or degenerate input data
  numeric,  // argument outside a function's mathematical domain
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// NaN or otherwise unusable value.
class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// Zero spread (constant vector or column) where a spread is required.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

class DecompositionError : public Error {
 public:
  explicit DecompositionError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

}  // namespace kemeny
