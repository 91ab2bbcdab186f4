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

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include <nlohmann/json.hpp>

#include "warpgate/error.h"
#include "warpgate/json_io.h"
#include "warpgate/random.h"
#include "warpgate/simhash.h"

namespace warpgate {
namespace {

constexpr std::string_view kMagic = "WGLSHIDX";
constexpr std::size_t kPreambleSize = 8 + 4 + 8;

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  std::vector<unsigned char>& bytes() { return bytes_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) {
      bytes_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
  }
  std::vector<unsigned char> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      fail(ErrorCode::kCorruptFile, "index file truncated");
    }
  }
  std::uint64_t get(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

nlohmann::json parse_embedder(const std::string& description) {
  try {
    return nlohmann::json::parse(description);
  } catch (const nlohmann::json::exception&) {
    return description;
  }
}

}  // namespace

void save_index(const LshIndex& index, const IndexFileInfo& info,
                const std::filesystem::path& path) {
  Writer payload;
  const nlohmann::json header = {
      {"lsh", lsh_config_to_json(index.config())},
      {"embedder", parse_embedder(info.embedder)},
      {"sample", sample_spec_to_json(info.sample)}};
  const std::string header_text = header.dump();
  payload.u64(header_text.size());
  payload.bytes().insert(payload.bytes().end(), header_text.begin(),
                         header_text.end());

  payload.u64(index.size());
  for (const auto& entry : index.entries()) {
    payload.str(entry.ref.table_id);
    payload.str(entry.ref.column_name);
    payload.u32(entry.ref.column_index);
    for (double x : entry.vector.components()) payload.f64(x);
  }
  for (const auto& table : index.tables()) {
    std::vector<std::uint32_t> keys;
    keys.reserve(table.size());
    for (const auto& [key, bucket] : table) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    payload.u64(keys.size());
    for (std::uint32_t key : keys) {
      const auto& bucket = table.at(key);
      payload.u32(key);
      payload.u32(static_cast<std::uint32_t>(bucket.size()));
      for (std::uint32_t ordinal : bucket) payload.u32(ordinal);
    }
  }

  Writer preamble;
  preamble.bytes().insert(preamble.bytes().end(), kMagic.begin(), kMagic.end());
  preamble.u32(info.format_version);
  preamble.u64(fnv1a64(payload.bytes()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(preamble.bytes().data()),
            static_cast<std::streamsize>(preamble.bytes().size()));
  out.write(reinterpret_cast<const char*>(payload.bytes().data()),
            static_cast<std::streamsize>(payload.bytes().size()));
  if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
}

LoadedIndex load_index(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    fail(ErrorCode::kFileNotFound, "index file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                         std::istreambuf_iterator<char>()};
  if (bytes.size() < kPreambleSize ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    fail(ErrorCode::kCorruptFile, path.string() + " is not a warpgate index file");
  }
  const std::span<const unsigned char> all(bytes);
  Reader preamble(all.subspan(kMagic.size(), 12));
  IndexFileInfo info;
  info.format_version = preamble.u32();
  if (info.format_version != kIndexFormatVersion) {
    fail(ErrorCode::kVersionMismatch,
         path.string() + ": format version " + std::to_string(info.format_version) +
             ", this build reads " + std::to_string(kIndexFormatVersion));
  }
  const std::uint64_t checksum = preamble.u64();
  const auto payload = all.subspan(kPreambleSize);
  if (fnv1a64(payload) != checksum) {
    fail(ErrorCode::kCorruptFile, path.string() + ": checksum mismatch");
  }

  Reader r(payload);
  const std::uint64_t header_len = r.u64();
  if (header_len > payload.size() - 8) fail(ErrorCode::kCorruptFile, "bad header length");
  nlohmann::json header;
  LshConfig lsh;
  try {
    header = nlohmann::json::parse(payload.begin() + 8,
                                   payload.begin() + 8 + static_cast<std::ptrdiff_t>(header_len));
    lsh = lsh_config_from_json(header.at("lsh"));
    info.sample = sample_spec_from_json(header.at("sample"));
    const auto& emb = header.at("embedder");
    info.embedder = emb.is_string() ? emb.get<std::string>() : emb.dump();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCorruptFile, path.string() + ": bad header: " + e.what());
  }
  r.skip(header_len);

  LshIndex index(lsh);
  const std::uint64_t n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    ColumnRef ref;
    ref.table_id = r.str();
    ref.column_name = r.str();
    ref.column_index = r.u32();
    std::vector<double> components(lsh.dimension);
    for (double& x : components) x = r.f64();
    index.insert(ref, EmbeddingVector(std::move(components)));
  }
  // Buckets are recomputed by insert(); the stored copy must agree.
  for (const auto& table : index.tables()) {
    const std::uint64_t buckets = r.u64();
    if (buckets != table.size()) {
      fail(ErrorCode::kCorruptFile, path.string() + ": bucket table mismatch");
    }
    for (std::uint64_t b = 0; b < buckets; ++b) {
      const std::uint32_t key = r.u32();
      const std::uint32_t count = r.u32();
      auto it = table.find(key);
      if (it == table.end() || it->second.size() != count) {
        fail(ErrorCode::kCorruptFile, path.string() + ": bucket table mismatch");
      }
      for (std::uint32_t k = 0; k < count; ++k) {
        if (r.u32() != it->second[k]) {
          fail(ErrorCode::kCorruptFile, path.string() + ": bucket table mismatch");
        }
      }
    }
  }
  if (!r.done()) fail(ErrorCode::kCorruptFile, path.string() + ": trailing bytes");
  return LoadedIndex{std::move(index), std::move(info)};
}

LoadedIndex load_index(const std::filesystem::path& path,
                       const Embedder& expected) {
  LoadedIndex loaded = load_index(path);
  const nlohmann::json want = parse_embedder(expected.describe());
  const nlohmann::json have = parse_embedder(loaded.info.embedder);
  if (want != have) {
    fail(ErrorCode::kConfigMismatch,
         path.string() + " was built with embedder " + have.dump() +
             ", engine is configured with " + want.dump());
  }
  if (loaded.index.config().dimension != expected.dimension()) {
    fail(ErrorCode::kConfigMismatch,
         path.string() + ": index dimension " +
             std::to_string(loaded.index.config().dimension) +
             " != embedder dimension " + std::to_string(expected.dimension()));
  }
  return loaded;
}

}  // namespace warpgate
