#pragma once

#include <stdexcept>
#include <string>

namespace mis {

/// Malformed input text. `line` is 1-based; 0 when no line applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line), message_(what) {}
  int line() const noexcept { return line_; }
  /// The text without the "line N: " prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  std::string message_;
};

/// A function was evaluated outside its domain (pole contact, negative base
/// under a fractional power, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller-side contract was violated (vertex out of range, dependent
/// partial solution, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mis
