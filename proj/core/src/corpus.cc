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

#include "warpgate/corpus.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "csv.h"
#include "warpgate/error.h"
#include "warpgate/random.h"

namespace warpgate {
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    fail(ErrorCode::kFileNotFound, "file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

struct ParsedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> columns;
  std::size_t rows = 0;
};

ParsedTable parse_csv(const std::string& text, const fs::path& path) {
  csv::Reader reader(text);
  auto header = reader.next();
  if (!header) fail(ErrorCode::kEmptyTable, path.string() + ": missing header");

  ParsedTable table;
  table.header = std::move(*header);
  table.columns.resize(table.header.size());
  while (auto record = reader.next()) {
    if (table.header.size() > 1 && record->size() == 1 && record->front().empty()) {
      continue;  // blank line
    }
    if (record->size() != table.header.size()) {
      fail(ErrorCode::kMalformedRow,
           path.string() + ": row " + std::to_string(table.rows + 1) + " has " +
               std::to_string(record->size()) + " fields, expected " +
               std::to_string(table.header.size()));
    }
    for (std::size_t c = 0; c < record->size(); ++c) {
      table.columns[c].push_back(std::move((*record)[c]));
    }
    ++table.rows;
  }
  return table;
}

std::string scalar_to_string(const nlohmann::json& v) {
  switch (v.type()) {
    case nlohmann::json::value_t::null:
      return {};
    case nlohmann::json::value_t::string:
      return v.get<std::string>();
    default:
      return v.dump();
  }
}

ParsedTable parse_jsonl(const std::string& text, const fs::path& path) {
  ParsedTable table;
  std::unordered_map<std::string, std::size_t> key_index;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where =
        path.string() + ": row " + std::to_string(table.rows + 1);
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kMalformedRow, where + ": " + e.what());
    }
    if (!row.is_object()) {
      fail(ErrorCode::kMalformedRow, where + ": not a JSON object");
    }
    for (auto it = row.begin(); it != row.end(); ++it) {
      if (it->is_object() || it->is_array()) {
        fail(ErrorCode::kMalformedRow,
             where + ": nested value for key '" + it.key() + "'");
      }
      if (!key_index.contains(it.key())) {
        key_index.emplace(it.key(), table.header.size());
        table.header.push_back(it.key());
        table.columns.emplace_back(table.rows, std::string());
      }
    }
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      auto found = row.find(table.header[c]);
      table.columns[c].push_back(found == row.end() ? std::string()
                                                    : scalar_to_string(*found));
    }
    ++table.rows;
  }
  return table;
}

}  // namespace

std::string make_table_id(std::string_view database, std::string_view name) {
  std::string key(database);
  key.push_back('\x1f');
  key.append(name);
  std::array<char, 18> buf{};
  std::snprintf(buf.data(), buf.size(), "t%016llx",
                static_cast<unsigned long long>(seeded_fnv1a(key, 0)));
  return buf.data();
}

std::vector<std::string> disambiguate_column_names(
    std::span<const std::string> raw) {
  std::vector<std::string> out;
  std::unordered_set<std::string> used;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string base = raw[i].empty() ? "column_" + std::to_string(i + 1) : raw[i];
    std::string name = base;
    for (int n = 2; used.contains(name); ++n) {
      name = base + "_" + std::to_string(n);
    }
    used.insert(name);
    out.push_back(std::move(name));
  }
  return out;
}

std::string_view to_string(SampleStrategy strategy) {
  switch (strategy) {
    case SampleStrategy::kFull:
      return "full";
    case SampleStrategy::kHead:
      return "head";
    case SampleStrategy::kReservoir:
      return "reservoir";
  }
  return "unknown";
}

SampleStrategy parse_sample_strategy(std::string_view text) {
  if (text == "full") return SampleStrategy::kFull;
  if (text == "head") return SampleStrategy::kHead;
  if (text == "reservoir") return SampleStrategy::kReservoir;
  fail(ErrorCode::kInvalidArgument,
       "unknown sample strategy '" + std::string(text) + "'");
}

void SampleSpec::validate() const {
  if (strategy != SampleStrategy::kFull && size == 0) {
    fail(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  }
}

bool is_null_marker(std::string_view value) noexcept {
  return value.empty() || value == "NULL" || value == "null" || value == "NaN" ||
         value == "N/A";
}

ColumnValues sample_values(std::span<const std::string> raw,
                           const SampleSpec& spec, ColumnRef column) {
  spec.validate();
  ColumnValues out;
  out.column = std::move(column);

  const bool bounded = spec.strategy != SampleStrategy::kFull;
  SplitMix64 rng(spec.seed);
  std::size_t seen = 0;
  for (const std::string& value : raw) {
    if (is_null_marker(value)) {
      ++out.null_count;
      continue;
    }
    if (!bounded || out.values.size() < spec.size) {
      out.values.push_back(value);
    } else if (spec.strategy == SampleStrategy::kReservoir) {
      const std::uint64_t j = rng.bounded(seen + 1);
      if (j < spec.size) out.values[j] = value;
    }
    ++seen;
  }

  std::vector<std::string_view> distinct(out.values.begin(), out.values.end());
  std::sort(distinct.begin(), distinct.end());
  out.distinct_count = static_cast<std::size_t>(
      std::unique(distinct.begin(), distinct.end()) - distinct.begin());
  return out;
}

const TableMeta& Catalog::load_table(const fs::path& path,
                                     std::string_view database,
                                     TableFormat format) {
  const std::string text = read_file(path);
  ParsedTable parsed = format == TableFormat::kCsv ? parse_csv(text, path)
                                                   : parse_jsonl(text, path);
  if (parsed.rows == 0) {
    fail(ErrorCode::kEmptyTable, path.string() + ": no data rows");
  }

  TableData data;
  data.meta.name = path.stem().string();
  data.meta.database = std::string(database);
  data.meta.table_id = make_table_id(data.meta.database, data.meta.name);
  data.meta.source_path = path;
  data.meta.column_names = disambiguate_column_names(parsed.header);
  data.meta.row_count = parsed.rows;
  data.columns = std::move(parsed.columns);
  return add(std::move(data));
}

const TableMeta& Catalog::add(TableData data) {
  if (ingested_at_.empty()) ingested_at_ = utc_timestamp();
  const std::string id = data.meta.table_id;
  if (auto it = by_id_.find(id); it != by_id_.end()) {
    tables_[it->second] = std::move(data);
    return tables_[it->second].meta;
  }
  by_id_.emplace(id, tables_.size());
  tables_.push_back(std::move(data));
  return tables_.back().meta;
}

RegisterReport Catalog::register_corpus(const fs::path& root,
                                        DatabaseNaming naming) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    fail(ErrorCode::kFileNotFound, "corpus root not found: " + root.string());
  }
  root_ = fs::absolute(root).lexically_normal();
  naming_ = naming;
  const std::string root_name =
      fs::weakly_canonical(root, ec).filename().string();

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(
           root, fs::directory_options::skip_permission_denied)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".csv" || ext == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  RegisterReport report;
  std::unordered_set<std::string> ids_this_run;
  for (const fs::path& file : files) {
    std::string database = root_name;
    if (naming == DatabaseNaming::kPerSubdirectory) {
      const fs::path rel = file.lexically_relative(root);
      auto first = rel.begin();
      if (std::distance(rel.begin(), rel.end()) > 1) database = first->string();
    }
    const std::string id = make_table_id(database, file.stem().string());
    if (!ids_this_run.insert(id).second) {
      report.rejected.push_back(
          {file, "duplicate table name '" + file.stem().string() +
                     "' in database '" + database + "'"});
      continue;
    }
    try {
      load_table(file, database,
                 file.extension() == ".csv" ? TableFormat::kCsv
                                            : TableFormat::kJsonl);
      ++report.tables_loaded;
    } catch (const Error& e) {
      report.rejected.push_back({file, e.what()});
    }
  }
  for (const auto& r : report.rejected) {
    log(LogLevel::kWarn, "rejected " + r.path.string() + ": " + r.reason);
  }
  rejected_ = report.rejected;
  return report;
}

std::size_t Catalog::column_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tables_) n += t.meta.column_names.size();
  return n;
}

std::vector<const TableMeta*> Catalog::tables() const {
  std::vector<const TableMeta*> out;
  out.reserve(tables_.size());
  for (const auto& t : tables_) out.push_back(&t.meta);
  return out;
}

const TableMeta* Catalog::find_table(std::string_view table_id) const {
  auto it = by_id_.find(std::string(table_id));
  return it == by_id_.end() ? nullptr : &tables_[it->second].meta;
}

const TableMeta& Catalog::table(std::string_view table_id) const {
  return data(table_id).meta;
}

const Catalog::TableData& Catalog::data(std::string_view table_id) const {
  auto it = by_id_.find(std::string(table_id));
  if (it == by_id_.end()) {
    fail(ErrorCode::kUnknownTable, "unknown table '" + std::string(table_id) + "'");
  }
  return tables_[it->second];
}

const TableMeta& Catalog::resolve_table(std::string_view name_or_id) const {
  if (const TableMeta* t = find_table(name_or_id)) return *t;
  const TableMeta* match = nullptr;
  std::size_t bare_matches = 0;
  for (const auto& t : tables_) {
    if (t.meta.database + "." + t.meta.name == name_or_id) return t.meta;
    if (t.meta.name == name_or_id) {
      match = &t.meta;
      ++bare_matches;
    }
  }
  if (bare_matches == 1) return *match;
  if (bare_matches > 1) {
    fail(ErrorCode::kUnknownTable, "table name '" + std::string(name_or_id) +
                                       "' is ambiguous; use database.name");
  }
  fail(ErrorCode::kUnknownTable, "unknown table '" + std::string(name_or_id) + "'");
}

ColumnRef Catalog::column_ref(std::string_view table_id,
                              std::string_view column_name) const {
  const TableMeta& meta = table(table_id);
  auto it = std::find(meta.column_names.begin(), meta.column_names.end(),
                      column_name);
  if (it == meta.column_names.end()) {
    fail(ErrorCode::kUnknownColumn, "unknown column '" +
                                        std::string(column_name) +
                                        "' in table '" + meta.name + "'");
  }
  return {meta.table_id, *it,
          static_cast<std::uint32_t>(it - meta.column_names.begin())};
}

ColumnRef Catalog::column_ref(std::string_view table_id,
                              std::size_t index) const {
  const TableMeta& meta = table(table_id);
  if (index >= meta.column_names.size()) {
    fail(ErrorCode::kUnknownColumn, "column index " + std::to_string(index) +
                                        " out of range in table '" +
                                        meta.name + "'");
  }
  return {meta.table_id, meta.column_names[index],
          static_cast<std::uint32_t>(index)};
}

std::vector<ColumnRef> Catalog::all_columns() const {
  std::vector<ColumnRef> out;
  for (const auto& t : tables_) {
    for (std::size_t c = 0; c < t.meta.column_names.size(); ++c) {
      out.push_back({t.meta.table_id, t.meta.column_names[c],
                     static_cast<std::uint32_t>(c)});
    }
  }
  return out;
}

std::span<const std::string> Catalog::column(const ColumnRef& ref) const {
  return column(ref.table_id, ref.column_index);
}

std::span<const std::string> Catalog::column(std::string_view table_id,
                                             std::size_t index) const {
  const TableData& t = data(table_id);
  if (index >= t.columns.size()) {
    fail(ErrorCode::kUnknownColumn, "column index " + std::to_string(index) +
                                        " out of range in table '" +
                                        t.meta.name + "'");
  }
  return t.columns[index];
}

ColumnValues Catalog::sample_column(const ColumnRef& ref,
                                    const SampleSpec& spec) const {
  ColumnRef resolved = column_ref(ref.table_id, ref.column_index);
  const auto raw = column(resolved);
  return sample_values(raw, spec, std::move(resolved));
}

std::string Catalog::manifest_json() const {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : tables_) {
    nlohmann::json columns = nlohmann::json::array();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      std::size_t nulls = 0;
      for (const auto& v : t.columns[c]) nulls += is_null_marker(v);
      columns.push_back({{"name", t.meta.column_names[c]},
                         {"index", c},
                         {"null_count", nulls}});
    }
    tables.push_back({{"table_id", t.meta.table_id},
                      {"name", t.meta.name},
                      {"database", t.meta.database},
                      {"source_path", t.meta.source_path.string()},
                      {"row_count", t.meta.row_count},
                      {"row_count_exact", t.meta.row_count_exact},
                      {"columns", std::move(columns)}});
  }
  nlohmann::json rejected = nlohmann::json::array();
  for (const auto& r : rejected_) {
    rejected.push_back({{"path", r.path.string()}, {"reason", r.reason}});
  }
  nlohmann::json doc = {{"corpus_root", root_.string()},
                        {"ingested_at", ingested_at_},
                        {"table_count", tables_.size()},
                        {"column_count", column_count()},
                        {"tables", std::move(tables)},
                        {"rejected", std::move(rejected)}};
  return doc.dump(2);
}

void Catalog::save_manifest(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << manifest_json() << '\n';
}

}  // namespace warpgate
