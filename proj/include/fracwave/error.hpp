#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracwave {

enum class ErrorCode {
  InvalidOrder,
  InvalidGrid,
  GridMismatch,
  InvalidArgument,
  InitialConditionViolation,
  TraceViolation,
  UnsupportedRange,
  RefineGrid,
  NumericalSingularity,
  Compatibility,
  ResourceCap,
  Domain,
  Evaluation,
  Syntax,
  Config,
  Io,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code lets
/// callers (mainly the CLI) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a time step is too coarse for the implicit march; carries the
/// smallest step count that satisfies the solvability bound.
class RefineGridError : public Error {
 public:
  RefineGridError(const std::string& what, std::size_t required_steps)
      : Error(ErrorCode::RefineGrid, what), required_steps_(required_steps) {}

  std::size_t required_steps() const noexcept { return required_steps_; }

 private:
  std::size_t required_steps_;
};

/// Byte offsets [start, end) into an expression source string.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

/// An error located in expression source (lexing, parsing or evaluation).
class SpanError : public Error {
 public:
  SpanError(ErrorCode code, const std::string& what, SourceSpan span)
      : Error(code, what), span_(span) {}

  SourceSpan span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

}  // namespace fracwave
