#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regdec {

// Machine-readable failure categories. The CLI maps these onto exit codes.
enum class ErrorCode {
  dimension_mismatch,
  invalid_argument,
  not_a_member,
  infeasible,
  iteration_cap,
  certificate_failure,
  io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when an exact search would exceed the configured cost cap.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& message, double log2_cost)
      : Error(ErrorCode::infeasible, message), log2_cost_(log2_cost) {}

  double log2_cost() const noexcept { return log2_cost_; }

 private:
  double log2_cost_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace regdec
