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

#include "warpgate/engine.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <unordered_map>

#include "warpgate/error.h"
#include "warpgate/json_io.h"

namespace warpgate {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::string_view naming_name(DatabaseNaming naming) {
  return naming == DatabaseNaming::kFlat ? "flat" : "per_subdirectory";
}

}  // namespace

void SearchParams::validate() const {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
}

bool ranks_before(const JoinCandidate& a, const JoinCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.database != b.database) return a.database < b.database;
  if (a.table_name != b.table_name) return a.table_name < b.table_name;
  if (a.column.column_name != b.column.column_name) {
    return a.column.column_name < b.column.column_name;
  }
  if (a.column.table_id != b.column.table_id) {
    return a.column.table_id < b.column.table_id;
  }
  return a.column.column_index < b.column.column_index;
}

nlohmann::json candidates_to_json(std::span<const JoinCandidate> candidates) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : candidates) {
    out.push_back({{"database", c.database},
                   {"table", c.table_name},
                   {"table_id", c.column.table_id},
                   {"column", c.column.column_name},
                   {"score", round_score(c.score)}});
  }
  return out;
}

nlohmann::json manifest_to_json(const IndexManifest& m) {
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : m.skipped) {
    skipped.push_back({{"table_id", s.column.table_id},
                       {"column", s.column.column_name},
                       {"column_index", s.column.column_index},
                       {"reason", s.reason}});
  }
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : m.ingestion_errors) {
    errors.push_back({{"path", e.path.string()}, {"reason", e.reason}});
  }
  nlohmann::json embedder;
  try {
    embedder = nlohmann::json::parse(m.embedder);
  } catch (const nlohmann::json::exception&) {
    embedder = m.embedder;
  }
  return {{"corpus_root", m.corpus_root},
          {"database_naming", naming_name(m.database_naming)},
          {"tables_indexed", m.tables_indexed},
          {"columns_indexed", m.columns_indexed},
          {"total_columns", m.total_columns},
          {"columns_skipped", skipped},
          {"ingestion_errors", errors},
          {"sample", sample_spec_to_json(m.sample)},
          {"embedder", embedder},
          {"lsh", lsh_config_to_json(m.lsh)},
          {"build_seconds", m.build_seconds},
          {"built_at", m.built_at}};
}

IndexManifest manifest_from_json(const nlohmann::json& j) {
  IndexManifest m;
  try {
    m.corpus_root = j.at("corpus_root").get<std::string>();
    m.database_naming = j.value("database_naming", "per_subdirectory") == "flat"
                            ? DatabaseNaming::kFlat
                            : DatabaseNaming::kPerSubdirectory;
    m.tables_indexed = j.value("tables_indexed", std::size_t{0});
    m.columns_indexed = j.value("columns_indexed", std::size_t{0});
    m.total_columns = j.value("total_columns", std::size_t{0});
    for (const auto& s : j.value("columns_skipped", nlohmann::json::array())) {
      m.skipped.push_back({{s.at("table_id").get<std::string>(),
                            s.at("column").get<std::string>(),
                            s.at("column_index").get<std::uint32_t>()},
                           s.at("reason").get<std::string>()});
    }
    for (const auto& e : j.value("ingestion_errors", nlohmann::json::array())) {
      m.ingestion_errors.push_back(
          {e.at("path").get<std::string>(), e.at("reason").get<std::string>()});
    }
    m.sample = sample_spec_from_json(j.at("sample"));
    const auto& emb = j.at("embedder");
    m.embedder = emb.is_string() ? emb.get<std::string>() : emb.dump();
    m.lsh = lsh_config_from_json(j.at("lsh"));
    m.build_seconds = j.value("build_seconds", 0.0);
    m.built_at = j.value("built_at", "");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad index manifest: ") + e.what());
  }
  return m;
}

DiscoveryEngine::DiscoveryEngine(std::shared_ptr<const Catalog> catalog,
                                 std::shared_ptr<const Embedder> embedder,
                                 std::unique_ptr<LshIndex> index,
                                 IndexManifest manifest)
    : catalog_(std::move(catalog)),
      embedder_(std::move(embedder)),
      index_(std::move(index)),
      manifest_(std::move(manifest)) {}

DiscoveryEngine DiscoveryEngine::build(std::shared_ptr<const Catalog> catalog,
                                       const SampleSpec& sample,
                                       std::shared_ptr<const Embedder> embedder,
                                       const LshConfig& lsh) {
  const auto start = Clock::now();
  sample.validate();
  lsh.validate();
  if (embedder->dimension() != lsh.dimension) {
    fail(ErrorCode::kConfigMismatch,
         "embedder dimension " + std::to_string(embedder->dimension()) +
             " != LSH dimension " + std::to_string(lsh.dimension));
  }
  if (catalog->empty()) fail(ErrorCode::kNothingIndexed, "catalog is empty");

  IndexManifest manifest;
  manifest.corpus_root = catalog->corpus_root().string();
  manifest.database_naming = catalog->database_naming();
  manifest.ingestion_errors = catalog->rejected_files();
  manifest.sample = sample;
  manifest.embedder = embedder->describe();
  manifest.lsh = lsh;

  auto index = std::make_unique<LshIndex>(lsh);
  for (const TableMeta* table : catalog->tables()) {
    bool any = false;
    for (std::size_t c = 0; c < table->column_names.size(); ++c) {
      const ColumnRef ref = catalog->column_ref(table->table_id, c);
      ++manifest.total_columns;
      const ColumnValues values = catalog->sample_column(ref, sample);
      EmbeddingVector v = embedder->embed_column(values.values);
      if (v.is_zero()) {
        manifest.skipped.push_back({ref, "empty"});
        continue;
      }
      index->insert(ref, std::move(v));
      ++manifest.columns_indexed;
      any = true;
    }
    manifest.tables_indexed += any;
  }
  if (manifest.columns_indexed == 0) {
    fail(ErrorCode::kNothingIndexed, "no column produced a non-empty embedding");
  }
  manifest.build_seconds = seconds_since(start);
  manifest.built_at = utc_now();
  return DiscoveryEngine(std::move(catalog), std::move(embedder),
                         std::move(index), std::move(manifest));
}

DiscoveryEngine DiscoveryEngine::open(std::shared_ptr<const Catalog> catalog,
                                      LoadedIndex loaded,
                                      std::shared_ptr<const Embedder> embedder,
                                      const IndexManifest* recorded) {
  const nlohmann::json want = nlohmann::json::parse(embedder->describe());
  nlohmann::json have;
  try {
    have = nlohmann::json::parse(loaded.info.embedder);
  } catch (const nlohmann::json::exception&) {
    have = loaded.info.embedder;
  }
  if (want != have || embedder->dimension() != loaded.index.config().dimension) {
    fail(ErrorCode::kConfigMismatch, "index was built with embedder " + have.dump() +
                                         ", engine is configured with " + want.dump());
  }

  IndexManifest manifest;
  manifest.corpus_root = catalog->corpus_root().string();
  manifest.database_naming = catalog->database_naming();
  manifest.ingestion_errors = catalog->rejected_files();
  if (recorded != nullptr) {
    manifest.build_seconds = recorded->build_seconds;
    manifest.built_at = recorded->built_at;
  }
  manifest.sample = loaded.info.sample;
  manifest.embedder = loaded.info.embedder;
  manifest.lsh = loaded.index.config();
  manifest.columns_indexed = loaded.index.size();

  for (const auto& entry : loaded.index.entries()) {
    const TableMeta* t = catalog->find_table(entry.ref.table_id);
    if (t == nullptr || entry.ref.column_index >= t->column_names.size() ||
        t->column_names[entry.ref.column_index] != entry.ref.column_name) {
      fail(ErrorCode::kConfigMismatch,
           "index entry " + entry.ref.table_id + "/" + entry.ref.column_name +
               " does not exist in the corpus");
    }
  }
  for (const TableMeta* table : catalog->tables()) {
    bool any = false;
    for (std::size_t c = 0; c < table->column_names.size(); ++c) {
      ++manifest.total_columns;
      const ColumnRef ref = catalog->column_ref(table->table_id, c);
      if (loaded.index.find(ref) != nullptr) {
        any = true;
      } else {
        manifest.skipped.push_back({ref, "empty"});
      }
    }
    manifest.tables_indexed += any;
  }
  auto index = std::make_unique<LshIndex>(std::move(loaded.index));
  return DiscoveryEngine(std::move(catalog), std::move(embedder),
                         std::move(index), std::move(manifest));
}

void DiscoveryEngine::save(const std::filesystem::path& index_path) const {
  save_index(*index_, IndexFileInfo{kIndexFormatVersion, manifest_.embedder,
                                    manifest_.sample},
             index_path);
}

EmbeddingVector DiscoveryEngine::embed_column(const ColumnRef& ref) const {
  return embedder_->embed_column(
      catalog_->sample_column(ref, manifest_.sample).values);
}

SearchResult DiscoveryEngine::search(const ColumnRef& query,
                                     const SearchParams& params) const {
  params.validate();
  const auto start = Clock::now();
  SearchResult result;

  const ColumnRef resolved = catalog_->column_ref(query.table_id, query.column_index);
  if (resolved.column_name != query.column_name && !query.column_name.empty()) {
    fail(ErrorCode::kUnknownColumn, "column '" + query.column_name +
                                        "' is not at index " +
                                        std::to_string(query.column_index));
  }
  ColumnValues values = catalog_->sample_column(resolved, manifest_.sample);
  result.timing.sample_seconds = seconds_since(start);

  const auto embed_start = Clock::now();
  const EmbeddingVector v = embedder_->embed_column(values.values);
  result.timing.embed_seconds = seconds_since(embed_start);

  rank(v, &resolved, params, result);
  result.timing.end_to_end_seconds = seconds_since(start);
  return result;
}

SearchResult DiscoveryEngine::search_values(std::span<const std::string> values,
                                            const SearchParams& params) const {
  params.validate();
  const auto start = Clock::now();
  SearchResult result;
  ColumnValues sample = sample_values(values, manifest_.sample);
  result.timing.sample_seconds = seconds_since(start);

  const auto embed_start = Clock::now();
  const EmbeddingVector v = embedder_->embed_column(sample.values);
  result.timing.embed_seconds = seconds_since(embed_start);

  rank(v, nullptr, params, result);
  result.timing.end_to_end_seconds = seconds_since(start);
  return result;
}

void DiscoveryEngine::rank(const EmbeddingVector& query,
                           const ColumnRef* exclude_column,
                           const SearchParams& params,
                           SearchResult& result) const {
  const auto lookup_start = Clock::now();
  const std::vector<std::uint32_t> ordinals = index_->candidate_ordinals(query);
  std::vector<std::pair<std::uint32_t, double>> scored;
  scored.reserve(ordinals.size());
  for (std::uint32_t ordinal : ordinals) {
    scored.emplace_back(ordinal, cosine(query, index_->entry(ordinal).vector));
  }
  result.timing.lookup_seconds = seconds_since(lookup_start);
  result.timing.candidates_examined = ordinals.size();

  const auto rank_start = Clock::now();
  const double min_score = params.min_score.value_or(default_min_score());
  auto& out = result.candidates;
  for (const auto& [ordinal, score] : scored) {
    if (score < min_score) continue;
    const ColumnRef& ref = index_->entry(ordinal).ref;
    if (exclude_column != nullptr) {
      if (ref == *exclude_column) continue;
      if (params.exclude_query_table && ref.table_id == exclude_column->table_id) {
        continue;
      }
    }
    const TableMeta& table = catalog_->table(ref.table_id);
    out.push_back({ref, table.name, table.database, score});
  }
  std::sort(out.begin(), out.end(), ranks_before);
  if (out.size() > params.k) out.resize(params.k);
  result.timing.rank_seconds = seconds_since(rank_start);
}

std::vector<ColumnSummary> DiscoveryEngine::list_candidate_columns(
    std::string_view table_id) const {
  const TableMeta& table = catalog_->table(table_id);
  std::vector<ColumnSummary> out;
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    const ColumnRef ref = catalog_->column_ref(table.table_id, c);
    const ColumnValues values = catalog_->sample_column(ref, manifest_.sample);
    out.push_back({table.column_names[c], ref.column_index, values.distinct_count,
                   values.null_count, values.values.size(),
                   index_->find(ref) != nullptr});
  }
  return out;
}

JoinPreview DiscoveryEngine::join_preview(std::string_view query_table,
                                          std::string_view query_column,
                                          const ColumnRef& candidate_column,
                                          std::span<const std::string> selected_columns,
                                          std::size_t limit) const {
  if (limit == 0) fail(ErrorCode::kInvalidArgument, "preview limit must be >= 1");
  const TableMeta& left = catalog_->table(query_table);
  const ColumnRef left_key = catalog_->column_ref(left.table_id, query_column);
  const TableMeta& right = catalog_->table(candidate_column.table_id);
  const ColumnRef right_key =
      candidate_column.column_name.empty()
          ? catalog_->column_ref(right.table_id, candidate_column.column_index)
          : catalog_->column_ref(right.table_id, candidate_column.column_name);

  std::vector<ColumnRef> selected;
  for (const auto& name : selected_columns) {
    selected.push_back(catalog_->column_ref(right.table_id, name));
  }

  // First candidate row per key, in candidate table order.
  const auto right_keys = catalog_->column(right_key);
  std::unordered_map<std::string_view, std::size_t> first_row;
  std::unordered_map<std::string_view, std::size_t> multiplicity;
  for (std::size_t r = 0; r < right_keys.size(); ++r) {
    if (is_null_marker(right_keys[r])) continue;
    first_row.try_emplace(right_keys[r], r);
    ++multiplicity[right_keys[r]];
  }

  JoinPreview preview;
  preview.columns = left.column_names;
  preview.first_added_column = preview.columns.size();
  for (const auto& ref : selected) {
    std::string name = ref.column_name;
    while (std::find(preview.columns.begin(), preview.columns.end(), name) !=
           preview.columns.end()) {
      name = right.name + "." + name;
    }
    preview.columns.push_back(std::move(name));
  }

  std::vector<std::span<const std::string>> left_cols;
  for (std::size_t c = 0; c < left.column_names.size(); ++c) {
    left_cols.push_back(catalog_->column(left.table_id, c));
  }
  std::vector<std::span<const std::string>> right_cols;
  for (const auto& ref : selected) right_cols.push_back(catalog_->column(ref));

  const auto left_keys = catalog_->column(left_key);
  std::vector<std::string_view> duplicated;
  preview.row_count = left.row_count;
  for (std::size_t r = 0; r < left.row_count; ++r) {
    const std::string& key = left_keys[r];
    auto match = is_null_marker(key) ? first_row.end() : first_row.find(key);
    if (match != first_row.end()) {
      ++preview.matched_rows;
      if (multiplicity[key] > 1) duplicated.push_back(key);
    }
    if (preview.rows.size() >= limit) continue;
    std::vector<std::optional<std::string>> row;
    row.reserve(preview.columns.size());
    for (const auto& col : left_cols) {
      if (is_null_marker(col[r])) {
        row.emplace_back(std::nullopt);
      } else {
        row.emplace_back(col[r]);
      }
    }
    for (const auto& col : right_cols) {
      if (match == first_row.end() || is_null_marker(col[match->second])) {
        row.emplace_back(std::nullopt);
      } else {
        row.emplace_back(col[match->second]);
      }
    }
    preview.rows.push_back(std::move(row));
  }

  std::sort(duplicated.begin(), duplicated.end());
  duplicated.erase(std::unique(duplicated.begin(), duplicated.end()), duplicated.end());
  for (std::string_view key : duplicated) {
    preview.duplicate_keys.emplace_back(key);
    preview.warnings.push_back("join key '" + std::string(key) + "' matches " +
                               std::to_string(multiplicity[key]) + " rows in " +
                               right.name + "; using the first");
  }
  return preview;
}

}  // namespace warpgate
