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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace warpgate {

/// Identity of one column in the catalog. Equality and ordering use
/// (table_id, column_index) only; column_name is carried for display.
struct ColumnRef {
  std::string table_id;
  std::string column_name;
  std::uint32_t column_index = 0;

  friend bool operator==(const ColumnRef& a, const ColumnRef& b) noexcept {
    return a.column_index == b.column_index && a.table_id == b.table_id;
  }
  friend std::strong_ordering operator<=>(const ColumnRef& a,
                                          const ColumnRef& b) noexcept {
    if (auto c = a.table_id <=> b.table_id; c != 0) return c;
    return a.column_index <=> b.column_index;
  }
};

struct ColumnRefHash {
  std::size_t operator()(const ColumnRef& ref) const noexcept {
    return std::hash<std::string>{}(ref.table_id) * 31 + ref.column_index;
  }
};

enum class TableFormat { kCsv, kJsonl };
enum class DatabaseNaming { kFlat, kPerSubdirectory };

struct TableMeta {
  std::string table_id;
  std::string name;
  std::string database;
  std::filesystem::path source_path;
  std::vector<std::string> column_names;
  std::size_t row_count = 0;
  // Always true for file-backed tables; kept for sources that only estimate.
  bool row_count_exact = true;

  bool operator==(const TableMeta&) const = default;
};

/// "t" followed by 16 hex digits of seeded_fnv1a(database + '\x1f' + name, 0).
std::string make_table_id(std::string_view database, std::string_view name);

/// Disambiguates duplicate header names left to right: x, x -> x, x_2.
/// Empty names become column_<1-based position>.
std::vector<std::string> disambiguate_column_names(
    std::span<const std::string> raw);

enum class SampleStrategy { kFull, kHead, kReservoir };

std::string_view to_string(SampleStrategy strategy);
SampleStrategy parse_sample_strategy(std::string_view text);

struct SampleSpec {
  SampleStrategy strategy = SampleStrategy::kReservoir;
  std::size_t size = 1000;
  std::uint64_t seed = 42;

  void validate() const;
  bool operator==(const SampleSpec&) const = default;
};

struct ColumnValues {
  ColumnRef column;
  std::vector<std::string> values;
  std::size_t null_count = 0;
  std::size_t distinct_count = 0;
};

/// {"", "NULL", "null", "NaN", "N/A"}, case-sensitive.
bool is_null_marker(std::string_view value) noexcept;

/// Drops null markers, then samples the remaining values in stream order.
/// Reservoir sampling is Algorithm R driven by SplitMix64(spec.seed).
ColumnValues sample_values(std::span<const std::string> raw,
                           const SampleSpec& spec, ColumnRef column = {});

struct RejectedFile {
  std::filesystem::path path;
  std::string reason;
};

struct RegisterReport {
  std::size_t tables_loaded = 0;
  std::vector<RejectedFile> rejected;
};

/// In-memory table catalog. Built by a single writer through load_table /
/// register_corpus; afterwards it is only read, and concurrent const access
/// is safe.
class Catalog {
 public:
  const TableMeta& load_table(const std::filesystem::path& path,
                              std::string_view database, TableFormat format);

  RegisterReport register_corpus(const std::filesystem::path& root,
                                 DatabaseNaming naming);

  std::size_t table_count() const noexcept { return tables_.size(); }
  std::size_t column_count() const noexcept;
  bool empty() const noexcept { return tables_.empty(); }

  /// Tables in registration order.
  std::vector<const TableMeta*> tables() const;
  const TableMeta* find_table(std::string_view table_id) const;
  const TableMeta& table(std::string_view table_id) const;

  /// Accepts a table id, "database.name", or a bare name that is unique in
  /// the catalog.
  const TableMeta& resolve_table(std::string_view name_or_id) const;

  ColumnRef column_ref(std::string_view table_id,
                       std::string_view column_name) const;
  ColumnRef column_ref(std::string_view table_id, std::size_t index) const;

  /// Every column, tables in registration order, columns left to right.
  std::vector<ColumnRef> all_columns() const;

  /// Raw cell strings of a column, nulls included.
  std::span<const std::string> column(const ColumnRef& ref) const;
  std::span<const std::string> column(std::string_view table_id,
                                      std::size_t index) const;

  ColumnValues sample_column(const ColumnRef& ref,
                             const SampleSpec& spec) const;

  const std::filesystem::path& corpus_root() const noexcept { return root_; }
  /// Naming used by the last register_corpus call.
  DatabaseNaming database_naming() const noexcept { return naming_; }
  const std::vector<RejectedFile>& rejected_files() const noexcept {
    return rejected_;
  }

  /// JSON manifest: tables, columns, counts, ingestion timestamp.
  std::string manifest_json() const;
  void save_manifest(const std::filesystem::path& path) const;

 private:
  struct TableData {
    TableMeta meta;
    std::vector<std::vector<std::string>> columns;
  };

  const TableMeta& add(TableData data);
  const TableData& data(std::string_view table_id) const;

  std::vector<TableData> tables_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::filesystem::path root_;
  DatabaseNaming naming_ = DatabaseNaming::kPerSubdirectory;
  std::vector<RejectedFile> rejected_;
  std::string ingested_at_;
};

}  // namespace warpgate
