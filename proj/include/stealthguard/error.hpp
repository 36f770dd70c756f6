#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stealthguard {

// Malformed topology, attack set or parameter combination.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed request that no topology can satisfy (e.g. fewer sensors than
// tolerated compromised nodes when observers can be attacked).
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InvalidInput {
 public:
  ParseError(std::size_t line, const std::string& message)
      : InvalidInput("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Numerical routine failed to produce a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stealthguard
