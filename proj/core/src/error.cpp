#include "regdec/error.hpp"

namespace regdec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch:
      return "dimension_mismatch";
    case ErrorCode::invalid_argument:
      return "invalid_argument";
    case ErrorCode::not_a_member:
      return "not_a_member";
    case ErrorCode::infeasible:
      return "infeasible";
    case ErrorCode::iteration_cap:
      return "iteration_cap";
    case ErrorCode::certificate_failure:
      return "certificate_failure";
    case ErrorCode::io:
      return "io";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace regdec
