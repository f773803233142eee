#pragma once

#include <stdexcept>
#include <string>

namespace dampen {

// Caller passed a value outside an operation's domain.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A declared property of an input (admissibility, boundedness, sign) does not hold.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// An exhaustive search or iteration would exceed its configured budget.
struct ResourceExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed external input. `line` is 1-based, 0 when not applicable.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line_no = 0)
      : std::runtime_error(line_no ? "line " + std::to_string(line_no) + ": " + what : what), line(line_no) {}
  std::size_t line;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dampen
