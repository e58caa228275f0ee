#pragma once

#include <stdexcept>
#include <string>

namespace fsw {

/// Raised when a value violates a type invariant or operation precondition.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised while reading a configuration file. Carries the 1-based line
/// number of the offending entry (0 when the problem is not tied to a line).
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string &message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

/// Raised when a time-stepped simulation cannot proceed.
class SimulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fsw
