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
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "csv.h"
#include "warpgate/error.h"
#include "warpgate/eval.h"
#include "warpgate/json_io.h"

namespace warpgate {
namespace {

std::optional<ColumnRef> try_resolve(const Catalog& catalog, const std::string& table,
                                     const std::string& column) {
  try {
    const TableMeta& t = catalog.resolve_table(table);
    return catalog.column_ref(t.table_id, column);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnknownTable || e.code() == ErrorCode::kUnknownColumn) {
      return std::nullopt;
    }
    throw;
  }
}

nlohmann::json ref_to_json(const ColumnRef& ref) {
  return {{"table_id", ref.table_id}, {"column", ref.column_name}};
}

}  // namespace

const GroundTruthEntry* GroundTruthSet::find(const ColumnRef& query) const {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), query,
      [](const GroundTruthEntry& e, const ColumnRef& q) { return e.query < q; });
  return it != entries.end() && it->query == query ? &*it : nullptr;
}

GroundTruthSet make_ground_truth(
    const std::map<ColumnRef, std::vector<ColumnRef>>& answers) {
  GroundTruthSet truth;
  for (const auto& [query, list] : answers) {
    GroundTruthEntry entry{query, {}};
    for (const auto& a : list) {
      if (!(a == query)) entry.answers.push_back(a);
    }
    std::sort(entry.answers.begin(), entry.answers.end());
    entry.answers.erase(std::unique(entry.answers.begin(), entry.answers.end()),
                        entry.answers.end());
    truth.entries.push_back(std::move(entry));
  }
  return truth;
}

GroundTruthSet load_ground_truth(const std::filesystem::path& path,
                                 const Catalog& catalog) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    fail(ErrorCode::kFileNotFound, "ground truth file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};

  std::map<ColumnRef, std::vector<ColumnRef>> grouped;
  GroundTruthSet truth;
  csv::Reader reader(text);
  std::size_t row = 0;
  while (auto record = reader.next()) {
    if (record->size() == 1 && record->front().empty()) continue;
    if (row++ == 0 && !record->empty() && record->front() == "query_table") continue;
    if (record->size() != 4) {
      fail(ErrorCode::kMalformedRow,
           path.string() + ": row " + std::to_string(reader.record_number()) +
               " has " + std::to_string(record->size()) + " fields, expected 4");
    }
    const auto& f = *record;
    auto query = try_resolve(catalog, f[0], f[1]);
    auto answer = try_resolve(catalog, f[2], f[3]);
    if (!query || !answer) {
      ++truth.dropped_rows;
      truth.warnings.push_back("row " + std::to_string(reader.record_number()) +
                               ": unresolvable reference " +
                               (query ? f[2] + "." + f[3] : f[0] + "." + f[1]));
      continue;
    }
    if (*query == *answer) {
      ++truth.dropped_rows;
      truth.warnings.push_back("row " + std::to_string(reader.record_number()) +
                               ": answer equals query");
      continue;
    }
    grouped[*query].push_back(*answer);
  }
  GroundTruthSet built = make_ground_truth(grouped);
  built.dropped_rows = truth.dropped_rows;
  built.warnings = std::move(truth.warnings);
  if (built.dropped_rows > 0) {
    log(LogLevel::kWarn, path.string() + ": dropped " +
                             std::to_string(built.dropped_rows) +
                             " unresolvable ground-truth rows");
  }
  return built;
}

const MetricsAtK* MetricsReport::at(std::size_t k) const {
  for (const auto& m : at_k) {
    if (m.k == k) return &m;
  }
  return nullptr;
}

MetricsReport precision_recall_at_k(
    const std::map<ColumnRef, std::vector<ColumnRef>>& results,
    const GroundTruthSet& truth, std::span<const std::size_t> ks) {
  MetricsReport report;
  for (std::size_t k : ks) report.at_k.push_back({k, 0.0, 0.0});

  std::size_t counted = 0;
  static const std::vector<ColumnRef> kNothing;
  for (const auto& entry : truth.entries) {
    if (entry.answers.empty()) {
      ++report.skipped_queries;
      continue;
    }
    ++counted;
    auto found = results.find(entry.query);
    const auto& returned = found == results.end() ? kNothing : found->second;

    QueryOutcome outcome{entry.query, returned, {}};
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const std::size_t k = ks[i];
      const std::size_t considered = std::min(k, returned.size());
      std::size_t hits = 0;
      for (std::size_t r = 0; r < considered; ++r) {
        // A repeated result is a hit only on its first occurrence.
        const auto first = returned.begin() + static_cast<std::ptrdiff_t>(r);
        hits += std::binary_search(entry.answers.begin(), entry.answers.end(),
                                   returned[r]) &&
                std::find(returned.begin(), first, returned[r]) == first;
      }
      MetricsAtK m{k, 0.0, 0.0};
      if (considered > 0) m.precision = static_cast<double>(hits) / considered;
      m.recall = static_cast<double>(hits) / entry.answers.size();
      outcome.at_k.push_back(m);
      report.at_k[i].precision += m.precision;
      report.at_k[i].recall += m.recall;
    }
    report.per_query.push_back(std::move(outcome));
  }
  if (counted > 0) {
    for (auto& m : report.at_k) {
      m.precision /= static_cast<double>(counted);
      m.recall /= static_cast<double>(counted);
    }
  }
  return report;
}

nlohmann::json metrics_to_json(const MetricsReport& report) {
  nlohmann::json at_k = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& m : report.at_k) {
    at_k.push_back({{"k", m.k}, {"precision", m.precision}, {"recall", m.recall}});
    summary["precision@" + std::to_string(m.k)] = m.precision;
    summary["recall@" + std::to_string(m.k)] = m.recall;
  }
  nlohmann::json per_query = nlohmann::json::array();
  for (const auto& q : report.per_query) {
    nlohmann::json returned = nlohmann::json::array();
    for (const auto& r : q.returned) returned.push_back(ref_to_json(r));
    nlohmann::json metrics = nlohmann::json::array();
    for (const auto& m : q.at_k) {
      metrics.push_back({{"k", m.k}, {"precision", m.precision}, {"recall", m.recall}});
    }
    per_query.push_back(
        {{"query", ref_to_json(q.query)}, {"returned", returned}, {"at_k", metrics}});
  }
  nlohmann::json out = {{"at_k", at_k},
                        {"summary", summary},
                        {"queries", report.per_query.size()},
                        {"skipped_queries", report.skipped_queries},
                        {"per_query", per_query}};
  if (report.timing) {
    const auto& t = *report.timing;
    out["timing"] = {{"mean_lookup_seconds", t.mean_lookup_seconds},
                     {"mean_end_to_end_seconds", t.mean_end_to_end_seconds},
                     {"max_lookup_seconds", t.max_lookup_seconds},
                     {"max_end_to_end_seconds", t.max_end_to_end_seconds},
                     {"cv_lookup", t.cv_lookup},
                     {"cv_end_to_end", t.cv_end_to_end},
                     {"queries", t.queries},
                     {"repetitions", t.repetitions},
                     {"lookup_within_end_to_end", t.lookup_within_end_to_end}};
  }
  nlohmann::json config = nlohmann::json::object();
  if (report.sample) config["sample"] = sample_spec_to_json(*report.sample);
  if (!report.embedder.empty()) {
    try {
      config["embedder"] = nlohmann::json::parse(report.embedder);
    } catch (const nlohmann::json::exception&) {
      config["embedder"] = report.embedder;
    }
  }
  if (report.lsh) config["lsh"] = lsh_config_to_json(*report.lsh);
  out["config"] = config;
  return out;
}

std::string metrics_to_text(const MetricsReport& report) {
  std::ostringstream out;
  out << "  k   precision   recall\n";
  for (const auto& m : report.at_k) {
    char line[64];
    std::snprintf(line, sizeof line, "%3zu   %9.4f   %6.4f\n", m.k, m.precision,
                  m.recall);
    out << line;
  }
  if (report.timing) {
    char line[160];
    std::snprintf(line, sizeof line,
                  "lookup %.3f ms/query, end-to-end %.3f ms/query (cv %.3f)\n",
                  report.timing->mean_lookup_seconds * 1e3,
                  report.timing->mean_end_to_end_seconds * 1e3,
                  report.timing->cv_end_to_end);
    out << line;
  }
  return out.str();
}

}  // namespace warpgate
