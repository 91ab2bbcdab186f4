// Copyright 2026 The Warpgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace warpgate {

enum class ErrorCode {
  kFileNotFound,
  kMalformedRow,
  kEmptyTable,
  kUnknownTable,
  kUnknownColumn,
  kDimensionMismatch,
  kConfigMismatch,
  kVersionMismatch,
  kCorruptFile,
  kIndexNotBuilt,
  kNothingIndexed,
  kInvalidSpec,
  kInvalidArgument,
  kBuildInProgress,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library. `code()` is stable and is what the
/// service and CLI layers map onto their own error vocabularies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

// Minimal diagnostic channel. Defaults to stderr; tests may silence it.
enum class LogLevel { kDebug, kInfo, kWarn, kError, kOff };
void set_log_level(LogLevel level);
void log(LogLevel level, std::string_view message);

}  // namespace warpgate
