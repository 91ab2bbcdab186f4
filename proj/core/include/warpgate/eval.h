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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "warpgate/corpus.h"
#include "warpgate/embedder.h"
#include "warpgate/engine.h"
#include "warpgate/simhash.h"

namespace warpgate {

// ---------------------------------------------------------------------------
// Ground truth

struct GroundTruthEntry {
  ColumnRef query;
  std::vector<ColumnRef> answers;  // sorted, unique, never contains query
};

struct GroundTruthSet {
  std::vector<GroundTruthEntry> entries;  // sorted by query
  std::size_t dropped_rows = 0;
  std::vector<std::string> warnings;

  const GroundTruthEntry* find(const ColumnRef& query) const;
};

/// CSV with header query_table,query_column,answer_table,answer_column.
/// Tables are resolved with Catalog::resolve_table. Rows naming a missing
/// table or column are dropped and counted; a row with the wrong number of
/// fields throws MalformedRow. A zero-byte file is an empty set.
GroundTruthSet load_ground_truth(const std::filesystem::path& path,
                                 const Catalog& catalog);

/// Builds a truth set directly from query -> answers lists.
GroundTruthSet make_ground_truth(
    const std::map<ColumnRef, std::vector<ColumnRef>>& answers);

// ---------------------------------------------------------------------------
// Metrics

struct MetricsAtK {
  std::size_t k = 0;
  double precision = 0.0;
  double recall = 0.0;
};

struct QueryOutcome {
  ColumnRef query;
  std::vector<ColumnRef> returned;
  std::vector<MetricsAtK> at_k;
};

struct TimingStats {
  double mean_lookup_seconds = 0.0;
  double mean_end_to_end_seconds = 0.0;
  double max_lookup_seconds = 0.0;
  double max_end_to_end_seconds = 0.0;
  double cv_lookup = 0.0;  // over per-repetition means
  double cv_end_to_end = 0.0;
  std::size_t queries = 0;
  std::size_t repetitions = 0;
  bool lookup_within_end_to_end = true;  // held for every measured query
};

struct MetricsReport {
  std::vector<MetricsAtK> at_k;  // unweighted means over queries
  std::vector<QueryOutcome> per_query;
  std::size_t skipped_queries = 0;  // truth entries with no answers
  std::optional<TimingStats> timing;
  std::optional<SampleSpec> sample;
  std::string embedder;
  std::optional<LshConfig> lsh;

  const MetricsAtK* at(std::size_t k) const;
};

/// Per query: precision@k = |top-k ∩ answers| / min(k, |returned|), and 0
/// when nothing is returned; recall@k = |top-k ∩ answers| / |answers|.
/// Truth queries missing from `results` count as returning nothing; truth
/// entries with empty answer sets are skipped.
MetricsReport precision_recall_at_k(
    const std::map<ColumnRef, std::vector<ColumnRef>>& results,
    const GroundTruthSet& truth, std::span<const std::size_t> ks);

nlohmann::json metrics_to_json(const MetricsReport& report);
std::string metrics_to_text(const MetricsReport& report);

// ---------------------------------------------------------------------------
// Brute-force oracle

/// Exact top-k by scanning every eligible column. Shares nothing with the
/// engine's candidate generation or ranking; column vectors are computed
/// once up front.
class BruteForceOracle {
 public:
  BruteForceOracle(std::shared_ptr<const Catalog> catalog,
                   std::shared_ptr<const Embedder> embedder, SampleSpec sample,
                   double default_min_score = LshConfig{}.similarity_threshold);

  std::vector<JoinCandidate> topk(const ColumnRef& query,
                                  const SearchParams& params) const;

 private:
  struct Column {
    ColumnRef ref;
    const TableMeta* table;
    EmbeddingVector vector;
  };

  std::shared_ptr<const Catalog> catalog_;
  std::shared_ptr<const Embedder> embedder_;
  SampleSpec sample_;
  double default_min_score_;
  std::vector<Column> columns_;
};

std::vector<JoinCandidate> brute_force_topk(
    const ColumnRef& query, std::shared_ptr<const Catalog> catalog,
    std::shared_ptr<const Embedder> embedder, const SampleSpec& sample,
    const SearchParams& params,
    double default_min_score = LshConfig{}.similarity_threshold);

// ---------------------------------------------------------------------------
// Synthetic testbed

struct NoiseProfile {
  double min_containment = 0.5;
  double max_containment = 1.0;
  double case_rate = 0.3;         // per value: UPPER / lower / Title
  double punctuation_rate = 0.2;  // per value: separators rewritten
  double affix_rate = 0.2;        // per value: column-specific prefix/suffix
  double null_rate = 0.02;        // per cell, written as empty

  void validate() const;
};

struct TestbedSpec {
  std::size_t num_tables = 10;
  std::size_t columns_per_table = 5;
  std::size_t rows_per_table = 1000;
  std::size_t planted_pairs = 20;
  std::size_t num_databases = 3;
  NoiseProfile noise;
  std::uint64_t seed = 7;

  void validate() const;  // throws InvalidSpec
};

struct PlantedPair {
  std::string table_a, column_a;  // "database.table", column name
  std::string table_b, column_b;
  double containment = 0.0;
};

struct Testbed {
  std::filesystem::path corpus_root;   // <out>/corpus, one subdir per database
  std::filesystem::path truth_path;    // <out>/ground_truth.csv
  std::vector<PlantedPair> pairs;
};

/// Writes a fully seeded CSV corpus whose planted pairs draw from a shared
/// value domain with partial overlap and surface noise. Ground truth holds
/// both directions of every planted pair.
Testbed generate_testbed(const TestbedSpec& spec,
                         const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// Timing, evaluation and ablation

/// Runs every query once as warm-up, then `repetitions` measured passes.
TimingStats measure_timing(const DiscoveryEngine& engine,
                           std::span<const ColumnRef> queries,
                           const SearchParams& params,
                           std::size_t repetitions = 3);

/// Searches every truth query with k = max(ks) and scores the results.
MetricsReport evaluate(const DiscoveryEngine& engine, const GroundTruthSet& truth,
                       std::span<const std::size_t> ks,
                       const SearchParams& params = {},
                       std::size_t timing_repetitions = 3);

struct AblationRow {
  std::optional<std::size_t> sample_size;  // nullopt = full column
  MetricsReport report;
  std::vector<MetricsAtK> delta_vs_full;  // this minus full, per k
  double build_seconds = 0.0;
};

struct AblationConfig {
  std::vector<std::optional<std::size_t>> sizes = {10, 100, 1000};
  std::vector<std::size_t> ks = {1, 3, 5, 10};
  std::uint64_t sample_seed = 42;
  LshConfig lsh;
  SearchParams params;
  std::size_t timing_repetitions = 3;
};

struct AblationResult {
  AblationRow full;
  std::vector<AblationRow> rows;  // in the order of config.sizes
};

/// Rebuilds the index once per sample size (reservoir strategy, same seeds
/// otherwise) plus once on full columns, and evaluates each.
AblationResult sampling_ablation(std::shared_ptr<const Catalog> catalog,
                                 std::shared_ptr<const Embedder> embedder,
                                 const GroundTruthSet& truth,
                                 const AblationConfig& config);

nlohmann::json ablation_to_json(const AblationResult& result);
std::string ablation_to_text(const AblationResult& result);
/// Plot-ready rows: k,precision,recall,size ("full" for full columns).
std::string ablation_to_csv(const AblationResult& result);

}  // namespace warpgate
