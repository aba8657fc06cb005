#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qrr {

enum class ErrorKind {
  ZeroSeries,
  NonPositiveScale,
  InsufficientOrder,
  IrrationalPower,
  DivisionByZeroFactor,
  FormallyDivergent,
  MaxTermsExceeded,
  DomainError,
  ZeroDenominator,
  SyntaxError,
  ArityError,
  UnboundVariable,
  TypeMismatch,
  ConfigError,
  Overflow,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the engine is reported through this one exception type;
/// callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace qrr
