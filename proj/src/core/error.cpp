#include "rcnet/error.hpp"

namespace rcnet {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidShape: return "invalid_shape";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kAxisOutOfRange: return "axis_out_of_range";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kConfigMismatch: return "config_mismatch";
    case ErrorCode::kUndefined: return "undefined";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace rcnet
