#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wigner {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an evolution produces a non-finite value.
class NumericAbort : public Error {
 public:
  NumericAbort(std::size_t step, const std::string& message)
      : Error("step " + std::to_string(step) + ": " + message), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Raised by the polynomial parser; position is a 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error("position " + std::to_string(position) + ": " + message), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Malformed or inconsistent run configuration; `line` is 0 when the problem
/// is not tied to a single line.
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& message)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wigner
