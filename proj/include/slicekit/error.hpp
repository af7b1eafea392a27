#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slicekit {

enum class ErrorCode {
  empty_input,
  unknown_language,
  invalid_argument,
  criterion_not_found,
  invalid_slice,
  no_valid_slice,
  empty_gold,
  id_mismatch,
  io,
  protocol,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::unknown_language: return "unknown_language";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::criterion_not_found: return "criterion_not_found";
    case ErrorCode::invalid_slice: return "invalid_slice";
    case ErrorCode::no_valid_slice: return "no_valid_slice";
    case ErrorCode::empty_gold: return "empty_gold";
    case ErrorCode::id_mismatch: return "id_mismatch";
    case ErrorCode::io: return "io";
    case ErrorCode::protocol: return "protocol";
  }
  return "unknown";
}

// Input-level failure. Internal invariant violations use std::logic_error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace slicekit
