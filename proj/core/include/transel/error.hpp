// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace transel {

enum class ErrorCode {
  kValidation,
  kDuplicateTask,
  kUnknownTask,
  kIo,
  kParse,
  kInsufficientData,
  kRun,
  kIncompleteCell,
  kIncomplete,
  kIntegrity,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "VALIDATION";
    case ErrorCode::kDuplicateTask: return "DUPLICATE_TASK";
    case ErrorCode::kUnknownTask: return "UNKNOWN_TASK";
    case ErrorCode::kIo: return "IO";
    case ErrorCode::kParse: return "PARSE";
    case ErrorCode::kInsufficientData: return "INSUFFICIENT_DATA";
    case ErrorCode::kRun: return "RUN";
    case ErrorCode::kIncompleteCell: return "INCOMPLETE_CELL";
    case ErrorCode::kIncomplete: return "INCOMPLETE";
    case ErrorCode::kIntegrity: return "INTEGRITY";
  }
  return "UNKNOWN";
}

/// Every failure surfaced by the library carries one of the codes above so
/// callers (and the CLI exit path) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace transel
