#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcnet {

enum class ErrorCode {
  kInvalidShape,
  kShapeMismatch,
  kAxisOutOfRange,
  kNumeric,
  kFormat,
  kInvalidArgument,
  kConfigMismatch,
  kUndefined,
  kNotFound,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can report it as structured diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace rcnet
