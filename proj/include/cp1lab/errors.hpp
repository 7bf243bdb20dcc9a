#pragma once

#include <stdexcept>
#include <string>

namespace cp1lab {

// Bad configuration: out-of-range orders, unsupported degrees, malformed setups.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Mathematical domain violations (radius out of range, scale overflow, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Mismatched dimensions between a space and a section / matrix.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Runtime numerical failures: non-finite integrands, non-convergence.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structured-document violations; carries the JSON-pointer-style path.
struct ParseError : std::runtime_error {
  ParseError(std::string path_in, const std::string& what_in)
      : std::runtime_error("at '" + path_in + "': " + what_in), path(std::move(path_in)) {}
  std::string path;
};

// Output-file failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cp1lab
