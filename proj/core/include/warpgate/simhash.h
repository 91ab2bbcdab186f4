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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "warpgate/corpus.h"
#include "warpgate/embedder.h"

namespace warpgate {

/// Banded SimHash parameters: num_tables hash tables, each keyed by
/// bits_per_table random-hyperplane sign bits.
struct LshConfig {
  std::size_t num_tables = 32;
  std::size_t bits_per_table = 8;
  std::size_t dimension = 128;
  std::uint64_t hyperplane_seed = 7;
  double similarity_threshold = 0.7;

  void validate() const;
  std::size_t total_bits() const noexcept { return num_tables * bits_per_table; }
  bool operator==(const LshConfig&) const = default;
};

/// Probability that a pair at the given cosine shares at least one of
/// `tables` keys of `bits` bits: 1 - (1 - p^bits)^tables, p = 1 - acos(c)/pi.
double banded_collision_probability(double cosine, std::size_t bits,
                                    std::size_t tables);

/// num_tables x bits_per_table hyperplane normals, row-major, each of
/// `dimension` standard normal components.
class HyperplaneSet {
 public:
  /// Draws every component in (table, bit, dim) order from
  /// GaussianSource(config.hyperplane_seed).
  static HyperplaneSet generate(const LshConfig& config);

  HyperplaneSet(std::size_t num_tables, std::size_t bits_per_table,
                std::size_t dimension, std::vector<double> planes);

  std::size_t num_tables() const noexcept { return num_tables_; }
  std::size_t bits_per_table() const noexcept { return bits_; }
  std::size_t dimension() const noexcept { return dimension_; }

  std::span<const double> plane(std::size_t table, std::size_t bit) const {
    return {planes_.data() + (table * bits_ + bit) * dimension_, dimension_};
  }

  bool operator==(const HyperplaneSet&) const = default;

 private:
  std::size_t num_tables_;
  std::size_t bits_;
  std::size_t dimension_;
  std::vector<double> planes_;
};

/// One key per table. Plane 0 of a table is the most significant bit; a
/// bit is 1 iff dot(plane, v) >= 0.
struct SimHashSignature {
  std::vector<std::uint32_t> keys;
  std::size_t bits_per_table = 0;

  bool operator==(const SimHashSignature&) const = default;
};

SimHashSignature signature(const EmbeddingVector& v, const HyperplaneSet& planes);

/// cos(pi * (1 - f)), f the fraction of agreeing bits. Throws
/// ConfigMismatch when the signature shapes differ.
double estimate_similarity(const SimHashSignature& a, const SimHashSignature& b);

/// Fraction of agreeing bits across all tables.
double bit_agreement(const SimHashSignature& a, const SimHashSignature& b);

class LshIndex {
 public:
  struct Entry {
    ColumnRef ref;
    EmbeddingVector vector;
    SimHashSignature signature;
  };
  using Bucket = std::vector<std::uint32_t>;  // entry ordinals
  using Table = std::unordered_map<std::uint32_t, Bucket>;

  explicit LshIndex(LshConfig config);

  const LshConfig& config() const noexcept { return config_; }
  const HyperplaneSet& planes() const noexcept { return planes_; }

  /// Re-inserting an indexed ref replaces its vector (logged).
  void insert(const ColumnRef& ref, EmbeddingVector v);

  /// Union over tables of the bucket v falls into, in entry order. No
  /// similarity filtering.
  std::vector<ColumnRef> query_candidates(const EmbeddingVector& v) const;
  std::vector<std::uint32_t> candidate_ordinals(const EmbeddingVector& v) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const Entry> entries() const noexcept { return entries_; }
  const Entry& entry(std::uint32_t ordinal) const { return entries_.at(ordinal); }
  const Entry* find(const ColumnRef& ref) const;

  std::span<const Table> tables() const noexcept { return tables_; }
  std::size_t bucket_entry_total(std::size_t table) const;

 private:
  void check_dimension(const EmbeddingVector& v, const char* op) const;

  LshConfig config_;
  HyperplaneSet planes_;
  std::vector<Entry> entries_;
  std::unordered_map<ColumnRef, std::uint32_t, ColumnRefHash> ordinal_of_;
  std::vector<Table> tables_;
};

inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// What an index file records besides the index itself.
struct IndexFileInfo {
  std::uint32_t format_version = kIndexFormatVersion;
  std::string embedder;  // Embedder::describe()
  SampleSpec sample;
};

/// Binary container, little-endian:
///   "WGLSHIDX" | u32 format_version | u64 checksum | payload
/// where checksum = fnv1a64(payload) and payload is
///   u64 header_len | header JSON {lsh, embedder, sample}
///   u64 n | n x (str table_id, str column_name, u32 column_index,
///                dimension x f64 components)
///   per table: u64 buckets | buckets x (u32 key, u32 count, count x u32)
/// Strings are u32 length + bytes. Buckets are written in ascending key order.
void save_index(const LshIndex& index, const IndexFileInfo& info,
                const std::filesystem::path& path);

struct LoadedIndex {
  LshIndex index;
  IndexFileInfo info;
};

/// Throws FileNotFound, CorruptFile (bad magic, truncation, checksum) or
/// VersionMismatch.
LoadedIndex load_index(const std::filesystem::path& path);

/// As above, then throws ConfigMismatch unless the file was produced by an
/// embedder with the same description as `expected`.
LoadedIndex load_index(const std::filesystem::path& path,
                       const Embedder& expected);

}  // namespace warpgate
