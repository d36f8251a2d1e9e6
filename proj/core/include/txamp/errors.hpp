#pragma once

#include <stdexcept>
#include <string>

namespace txamp {

/// Violated precondition on an operation argument.
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A distribution handed to a numeric integral is not a valid density.
class integration_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simulation setup that cannot produce meaningful results.
class configuration_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file problem. Carries the offending path and line so the CLI can
/// print a diagnostic naming both.
class parse_error : public std::runtime_error {
 public:
  parse_error(std::string path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

}  // namespace txamp
