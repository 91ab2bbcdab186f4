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
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "warpgate/corpus.h"
#include "warpgate/embedder.h"
#include "warpgate/simhash.h"

namespace warpgate {

struct SearchParams {
  std::size_t k = 10;
  // Unset means the index's similarity_threshold.
  std::optional<double> min_score;
  bool exclude_query_table = true;

  void validate() const;
};

struct JoinCandidate {
  ColumnRef column;
  std::string table_name;
  std::string database;
  double score = 0.0;

  bool operator==(const JoinCandidate&) const = default;
};

/// Total result order: score descending, then database, table name and
/// column name ascending, then column index.
bool ranks_before(const JoinCandidate& a, const JoinCandidate& b);

struct SkippedColumn {
  ColumnRef column;
  std::string reason;
};

struct IndexManifest {
  std::string corpus_root;
  DatabaseNaming database_naming = DatabaseNaming::kPerSubdirectory;
  std::size_t tables_indexed = 0;
  std::size_t columns_indexed = 0;
  std::size_t total_columns = 0;
  std::vector<SkippedColumn> skipped;
  std::vector<RejectedFile> ingestion_errors;
  SampleSpec sample;
  std::string embedder;  // Embedder::describe()
  LshConfig lsh;
  double build_seconds = 0.0;
  std::string built_at;
};

nlohmann::json manifest_to_json(const IndexManifest& manifest);
IndexManifest manifest_from_json(const nlohmann::json& j);

/// Wall-clock breakdown of one search. lookup covers LSH bucket retrieval
/// plus exact re-scoring; end_to_end covers the whole call.
struct SearchTiming {
  double sample_seconds = 0.0;
  double embed_seconds = 0.0;
  double lookup_seconds = 0.0;
  double rank_seconds = 0.0;
  double end_to_end_seconds = 0.0;
  std::size_t candidates_examined = 0;
};

struct SearchResult {
  std::vector<JoinCandidate> candidates;
  SearchTiming timing;
};

/// [{database, table, column, score}] with scores rounded to 4 places.
nlohmann::json candidates_to_json(std::span<const JoinCandidate> candidates);

struct ColumnSummary {
  std::string name;
  std::uint32_t index = 0;
  std::size_t distinct_count = 0;  // of the indexed sample
  std::size_t null_count = 0;      // over the whole column
  std::size_t sampled = 0;
  bool indexed = false;
};

struct JoinPreview {
  std::vector<std::string> columns;  // query table columns, then added ones
  std::size_t first_added_column = 0;
  std::vector<std::vector<std::optional<std::string>>> rows;  // <= limit
  std::size_t row_count = 0;  // rows of the full join == query table rows
  std::size_t matched_rows = 0;
  std::vector<std::string> duplicate_keys;
  std::vector<std::string> warnings;
};

/// Both pipelines over one catalog and one index: build (sample, embed,
/// insert) and search (embed query, bucket lookup, exact re-rank, top-k).
/// An engine is immutable once constructed, so searches may run
/// concurrently.
class DiscoveryEngine {
 public:
  static DiscoveryEngine build(std::shared_ptr<const Catalog> catalog,
                               const SampleSpec& sample,
                               std::shared_ptr<const Embedder> embedder,
                               const LshConfig& lsh);

  /// Attaches a loaded index to its catalog. Throws ConfigMismatch when the
  /// embedder or corpus does not match what the index was built from.
  /// `recorded`, e.g. read from a manifest sidecar, supplies the build time
  /// fields that the index file leaves out.
  static DiscoveryEngine open(std::shared_ptr<const Catalog> catalog,
                              LoadedIndex loaded,
                              std::shared_ptr<const Embedder> embedder,
                              const IndexManifest* recorded = nullptr);

  void save(const std::filesystem::path& index_path) const;

  const IndexManifest& manifest() const noexcept { return manifest_; }
  const LshIndex& index() const noexcept { return *index_; }
  const Catalog& catalog() const noexcept { return *catalog_; }
  std::shared_ptr<const Catalog> catalog_ptr() const noexcept { return catalog_; }
  const Embedder& embedder() const noexcept { return *embedder_; }
  const SampleSpec& sample_spec() const noexcept { return manifest_.sample; }
  double default_min_score() const noexcept {
    return manifest_.lsh.similarity_threshold;
  }

  /// Recomputes the query vector from a fresh sample of the column.
  SearchResult search(const ColumnRef& query, const SearchParams& params) const;
  /// Ad-hoc query column given as raw values; nothing is excluded.
  SearchResult search_values(std::span<const std::string> values,
                             const SearchParams& params) const;

  std::vector<JoinCandidate> search_topk(const ColumnRef& query,
                                         const SearchParams& params) const {
    return search(query, params).candidates;
  }

  EmbeddingVector embed_column(const ColumnRef& ref) const;

  std::vector<ColumnSummary> list_candidate_columns(std::string_view table_id) const;

  /// Left join of the query table with the candidate table on string
  /// equality of the join columns. One output row per query row: duplicate
  /// candidate keys take the first candidate row and are reported.
  JoinPreview join_preview(std::string_view query_table,
                           std::string_view query_column,
                           const ColumnRef& candidate_column,
                           std::span<const std::string> selected_columns,
                           std::size_t limit) const;

 private:
  DiscoveryEngine(std::shared_ptr<const Catalog> catalog,
                  std::shared_ptr<const Embedder> embedder,
                  std::unique_ptr<LshIndex> index, IndexManifest manifest);

  void rank(const EmbeddingVector& query, const ColumnRef* exclude_column,
            const SearchParams& params, SearchResult& result) const;

  std::shared_ptr<const Catalog> catalog_;
  std::shared_ptr<const Embedder> embedder_;
  std::shared_ptr<const LshIndex> index_;
  IndexManifest manifest_;
};

}  // namespace warpgate
