#pragma once

#include <stdexcept>
#include <string>

namespace gcl {

// Bad arguments or malformed input data. Maps to CLI exit code 1.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A text or binary file could not be parsed. Carries the 1-based line when
// the format is line oriented (0 otherwise).
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : InvalidInput(format(path, line, what)), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& path, std::size_t line,
                            const std::string& what) {
    if (line == 0) return path + ": " + what;
    return path + ":" + std::to_string(line) + ": " + what;
  }

  std::size_t line_;
};

// Input is well formed but cannot support the computation (zero covariance,
// no positives, empty required bin, ...).
class DegenerateInput : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Failures that happen while running (I/O, divergence). Exit code 2.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gcl
