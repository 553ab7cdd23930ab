#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coshare {

// Base for every error raised by the library. Rejections of individual flows
// are reported as data (see assignment.hpp), never thrown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// The scenario cannot be built as configured (e.g. no node can host a
// required primary instance).
class InfeasibleScenario : public Error {
 public:
  using Error::Error;
};

}  // namespace coshare
