// Copyright 2026 The shiftacc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHIFTACC_ERROR_HPP
#define SHIFTACC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace shiftacc {

enum class ErrorCode {
  kNonFiniteValue,
  kValueOutOfRange,
  kRowSumViolation,
  kBadShape,
  kClassCountMismatch,
  kMissingLabels,
  kLabelOutOfRange,
  kEmptyInput,
  kInvalidConfig,
  kParseError,
  kIoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::kRowSumViolation: return "RowSumViolation";
    case ErrorCode::kBadShape: return "BadShape";
    case ErrorCode::kClassCountMismatch: return "ClassCountMismatch";
    case ErrorCode::kMissingLabels: return "MissingLabels";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library. The code is stable and is what the
/// CLI maps onto exit statuses; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace shiftacc

#endif  // SHIFTACC_ERROR_HPP
