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

#include "csv.h"

#include "warpgate/error.h"

namespace warpgate::csv {

Reader::Reader(std::string_view text) : text_(text) {
  if (text_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
}

std::optional<std::vector<std::string>> Reader::next() {
  if (pos_ >= text_.size()) return std::nullopt;
  ++record_;

  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool after_quote = false;

  while (pos_ < text_.size()) {
    const char c = text_[pos_];
    if (quoted) {
      if (c == '"') {
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
          field.push_back('"');
          pos_ += 2;
          continue;
        }
        quoted = false;
        after_quote = true;
      } else {
        field.push_back(c);
      }
      ++pos_;
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
      ++pos_;
      continue;
    }
    if (c == '\n' || c == '\r') {
      pos_ += (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n')
                  ? 2
                  : 1;
      fields.push_back(std::move(field));
      return fields;
    }
    if (after_quote) {
      fail(ErrorCode::kMalformedRow,
           "record " + std::to_string(record_) +
               ": unexpected character after closing quote");
    }
    if (c == '"' && field.empty()) {
      quoted = true;
    } else {
      field.push_back(c);
    }
    ++pos_;
  }
  if (quoted) {
    fail(ErrorCode::kMalformedRow,
         "record " + std::to_string(record_) + ": unterminated quoted field");
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line.push_back(',');
    line += escape(fields[i]);
  }
  line.push_back('\n');
  return line;
}

}  // namespace warpgate::csv
