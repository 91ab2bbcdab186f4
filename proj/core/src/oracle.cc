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

#include <tuple>

#include "warpgate/eval.h"

namespace warpgate {
namespace {

// Strict "a goes first" for the oracle. Deliberately written out here rather
// than calling ranks_before, so the two orderings check each other.
bool oracle_first(const JoinCandidate& a, const JoinCandidate& b) {
  const double neg_a = -a.score;
  const double neg_b = -b.score;
  return std::tie(neg_a, a.database, a.table_name, a.column.column_name,
                  a.column.table_id, a.column.column_index) <
         std::tie(neg_b, b.database, b.table_name, b.column.column_name,
                  b.column.table_id, b.column.column_index);
}

}  // namespace

BruteForceOracle::BruteForceOracle(std::shared_ptr<const Catalog> catalog,
                                   std::shared_ptr<const Embedder> embedder,
                                   SampleSpec sample, double default_min_score)
    : catalog_(std::move(catalog)),
      embedder_(std::move(embedder)),
      sample_(sample),
      default_min_score_(default_min_score) {
  for (const ColumnRef& ref : catalog_->all_columns()) {
    EmbeddingVector v =
        embedder_->embed_column(catalog_->sample_column(ref, sample_).values);
    if (v.is_zero()) continue;
    columns_.push_back({ref, &catalog_->table(ref.table_id), std::move(v)});
  }
}

std::vector<JoinCandidate> BruteForceOracle::topk(const ColumnRef& query,
                                                  const SearchParams& params) const {
  params.validate();
  const ColumnRef q = catalog_->column_ref(query.table_id, query.column_index);
  const EmbeddingVector qv =
      embedder_->embed_column(catalog_->sample_column(q, sample_).values);
  const double min_score = params.min_score.value_or(default_min_score_);

  // Bounded insertion into a sorted buffer of at most k entries.
  std::vector<JoinCandidate> best;
  best.reserve(params.k + 1);
  for (const Column& col : columns_) {
    if (col.ref == q) continue;
    if (params.exclude_query_table && col.ref.table_id == q.table_id) continue;
    const double score = cosine(qv, col.vector);
    if (score < min_score) continue;
    JoinCandidate cand{col.ref, col.table->name, col.table->database, score};
    std::size_t pos = best.size();
    while (pos > 0 && oracle_first(cand, best[pos - 1])) --pos;
    if (pos >= params.k) continue;
    best.insert(best.begin() + static_cast<std::ptrdiff_t>(pos), std::move(cand));
    if (best.size() > params.k) best.pop_back();
  }
  return best;
}

std::vector<JoinCandidate> brute_force_topk(const ColumnRef& query,
                                            std::shared_ptr<const Catalog> catalog,
                                            std::shared_ptr<const Embedder> embedder,
                                            const SampleSpec& sample,
                                            const SearchParams& params,
                                            double default_min_score) {
  return BruteForceOracle(std::move(catalog), std::move(embedder), sample,
                          default_min_score)
      .topk(query, params);
}

}  // namespace warpgate
