#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gnblab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature did not reach its tolerance. Carries the best value
/// found and the achieved error estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double error_estimate)
      : std::runtime_error(what + " (value " + std::to_string(value) +
                           ", achieved error " +
                           std::to_string(error_estimate) + ")"),
        value_(value),
        error_estimate_(error_estimate) {}

  double value() const noexcept { return value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double value_;
  double error_estimate_;
};

/// Data cannot identify the requested model (e.g. all counts equal).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver stopped without meeting its stopping rule.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or unknown registry entry.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; line is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gnblab
