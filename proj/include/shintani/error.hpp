#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shintani {

enum class ErrorKind {
  Domain,
  Precision,
  NotSquareFree,
  EvenDigit,
  NonIntegral,
  Overflow,
  ZeroConductor,
  UnitConductor,
  PeriodMismatch,
  SingularPoint,
  QTooClose,
  NonConvergent,
  SlowConvergence,
  ConductorNotRational,
  TailTooLarge,
  InsufficientPrecision,
  BudgetExceeded,
  Parse,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so that callers (the
/// CLI in particular) can map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failures additionally record the 0-based column of the offending
/// character.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : Error(ErrorKind::Parse, "at column " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace shintani
