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
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "warpgate/error.h"
#include "warpgate/eval.h"
#include "warpgate/json_io.h"

namespace warpgate {
namespace {

double coefficient_of_variation(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  if (mean == 0.0) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1)) / mean;
}

std::string size_label(const std::optional<std::size_t>& size) {
  return size ? std::to_string(*size) : "full";
}

nlohmann::json row_to_json(const AblationRow& row) {
  nlohmann::json deltas = nlohmann::json::array();
  for (const auto& d : row.delta_vs_full) {
    deltas.push_back({{"k", d.k}, {"precision", d.precision}, {"recall", d.recall}});
  }
  return {{"sample_size", size_label(row.sample_size)},
          {"build_seconds", row.build_seconds},
          {"metrics", metrics_to_json(row.report)},
          {"delta_vs_full", deltas}};
}

}  // namespace

TimingStats measure_timing(const DiscoveryEngine& engine,
                           std::span<const ColumnRef> queries,
                           const SearchParams& params, std::size_t repetitions) {
  TimingStats stats;
  stats.queries = queries.size();
  stats.repetitions = repetitions;
  if (queries.empty() || repetitions == 0) return stats;

  for (const auto& q : queries) engine.search(q, params);  // warm-up

  std::vector<double> rep_lookup;
  std::vector<double> rep_e2e;
  double total_lookup = 0.0;
  double total_e2e = 0.0;
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    double lookup = 0.0;
    double e2e = 0.0;
    for (const auto& q : queries) {
      const SearchTiming t = engine.search(q, params).timing;
      lookup += t.lookup_seconds;
      e2e += t.end_to_end_seconds;
      stats.max_lookup_seconds = std::max(stats.max_lookup_seconds, t.lookup_seconds);
      stats.max_end_to_end_seconds =
          std::max(stats.max_end_to_end_seconds, t.end_to_end_seconds);
      if (t.lookup_seconds > t.end_to_end_seconds) stats.lookup_within_end_to_end = false;
    }
    rep_lookup.push_back(lookup / queries.size());
    rep_e2e.push_back(e2e / queries.size());
    total_lookup += lookup;
    total_e2e += e2e;
  }
  const double n = static_cast<double>(queries.size() * repetitions);
  stats.mean_lookup_seconds = total_lookup / n;
  stats.mean_end_to_end_seconds = total_e2e / n;
  stats.cv_lookup = coefficient_of_variation(rep_lookup);
  stats.cv_end_to_end = coefficient_of_variation(rep_e2e);
  return stats;
}

MetricsReport evaluate(const DiscoveryEngine& engine, const GroundTruthSet& truth,
                       std::span<const std::size_t> ks, const SearchParams& params,
                       std::size_t timing_repetitions) {
  SearchParams p = params;
  p.k = ks.empty() ? params.k : *std::max_element(ks.begin(), ks.end());

  std::map<ColumnRef, std::vector<ColumnRef>> results;
  std::vector<ColumnRef> queries;
  for (const auto& entry : truth.entries) {
    std::vector<ColumnRef> returned;
    for (const auto& c : engine.search_topk(entry.query, p)) returned.push_back(c.column);
    results.emplace(entry.query, std::move(returned));
    queries.push_back(entry.query);
  }
  MetricsReport report = precision_recall_at_k(results, truth, ks);
  report.timing = measure_timing(engine, queries, p, timing_repetitions);
  report.sample = engine.sample_spec();
  report.embedder = engine.embedder().describe();
  report.lsh = engine.index().config();
  return report;
}

AblationResult sampling_ablation(std::shared_ptr<const Catalog> catalog,
                                 std::shared_ptr<const Embedder> embedder,
                                 const GroundTruthSet& truth,
                                 const AblationConfig& config) {
  auto run = [&](const std::optional<std::size_t>& size) {
    SampleSpec spec;
    spec.seed = config.sample_seed;
    if (size) {
      spec.strategy = SampleStrategy::kReservoir;
      spec.size = *size;
    } else {
      spec.strategy = SampleStrategy::kFull;
    }
    const DiscoveryEngine engine =
        DiscoveryEngine::build(catalog, spec, embedder, config.lsh);
    AblationRow row;
    row.sample_size = size;
    row.build_seconds = engine.manifest().build_seconds;
    row.report = evaluate(engine, truth, config.ks, config.params,
                          config.timing_repetitions);
    return row;
  };

  AblationResult result;
  result.full = run(std::nullopt);
  for (const auto& size : config.sizes) {
    AblationRow row = size ? run(size) : result.full;
    for (const auto& m : row.report.at_k) {
      const MetricsAtK* base = result.full.report.at(m.k);
      row.delta_vs_full.push_back(
          {m.k, m.precision - base->precision, m.recall - base->recall});
    }
    result.rows.push_back(std::move(row));
  }
  for (const auto& m : result.full.report.at_k) {
    result.full.delta_vs_full.push_back({m.k, 0.0, 0.0});
  }
  return result;
}

nlohmann::json ablation_to_json(const AblationResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows) rows.push_back(row_to_json(row));
  return {{"full", row_to_json(result.full)}, {"sizes", rows}};
}

std::string ablation_to_text(const AblationResult& result) {
  std::ostringstream out;
  out << "sample    k   precision   recall    d_prec   d_recall   lookup_ms   e2e_ms\n";
  auto emit = [&](const AblationRow& row) {
    for (std::size_t i = 0; i < row.report.at_k.size(); ++i) {
      const auto& m = row.report.at_k[i];
      const auto& d = row.delta_vs_full[i];
      const double lookup_ms =
          row.report.timing ? row.report.timing->mean_lookup_seconds * 1e3 : 0.0;
      const double e2e_ms =
          row.report.timing ? row.report.timing->mean_end_to_end_seconds * 1e3 : 0.0;
      char line[160];
      std::snprintf(line, sizeof line,
                    "%-6s  %3zu   %9.4f   %6.4f   %+7.4f   %+8.4f   %9.3f   %6.3f\n",
                    size_label(row.sample_size).c_str(), m.k, m.precision, m.recall,
                    d.precision, d.recall, lookup_ms, e2e_ms);
      out << line;
    }
  };
  emit(result.full);
  for (const auto& row : result.rows) {
    if (row.sample_size) emit(row);
  }
  return out.str();
}

std::string ablation_to_csv(const AblationResult& result) {
  std::ostringstream out;
  out << "k,precision,recall,size\n";
  auto emit = [&](const AblationRow& row) {
    for (const auto& m : row.report.at_k) {
      char line[96];
      std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%s\n", m.k, m.precision,
                    m.recall, size_label(row.sample_size).c_str());
      out << line;
    }
  };
  emit(result.full);
  for (const auto& row : result.rows) {
    if (row.sample_size) emit(row);
  }
  return out.str();
}

}  // namespace warpgate
