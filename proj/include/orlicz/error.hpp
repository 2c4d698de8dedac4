#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace orlicz {

enum class ErrorKind {
  invalid_parameter,
  invalid_function,
  invalid_input,
  unsupported_dimension,
  numeric_overflow,
  tolerance_not_met,
  divergent_modular,
  undefined_ratio,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_function: return "invalid-function";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::unsupported_dimension: return "unsupported-dimension";
    case ErrorKind::numeric_overflow: return "numeric-overflow";
    case ErrorKind::tolerance_not_met: return "tolerance-not-met";
    case ErrorKind::divergent_modular: return "divergent-modular";
    case ErrorKind::undefined_ratio: return "undefined-ratio";
  }
  return "unknown";
}

/// Validation errors (bad parameters, bad input) vs. numeric failures.
inline bool is_validation_error(ErrorKind kind) {
  return kind == ErrorKind::invalid_parameter || kind == ErrorKind::invalid_input ||
         kind == ErrorKind::unsupported_dimension || kind == ErrorKind::invalid_function;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when an integral could not be brought under tolerance; carries the
/// best estimate reached.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& what, double estimate, double error_estimate)
      : Error(ErrorKind::tolerance_not_met,
              what + " (estimate " + format(estimate) + ", error " + format(error_estimate) + ")"),
        estimate_(estimate),
        error_estimate_(error_estimate) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  double estimate_;
  double error_estimate_;
};

}  // namespace orlicz
