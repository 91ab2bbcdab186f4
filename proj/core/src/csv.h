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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace warpgate::csv {

/// Pull parser for RFC 4180 text. Accepts LF or CRLF record separators, a
/// leading UTF-8 BOM, and a missing final line break.
class Reader {
 public:
  explicit Reader(std::string_view text);

  /// Next record, or nullopt at end of input. Throws Error(kMalformedRow) on
  /// an unterminated quoted field or stray characters after a closing quote.
  std::optional<std::vector<std::string>> next();

  /// 1-based number of the record most recently returned.
  std::size_t record_number() const noexcept { return record_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t record_ = 0;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);

}  // namespace warpgate::csv
