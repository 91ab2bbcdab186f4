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

#include "warpgate/simhash.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "warpgate/error.h"
#include "warpgate/random.h"

namespace warpgate {

void LshConfig::validate() const {
  if (num_tables == 0) fail(ErrorCode::kInvalidArgument, "num_tables must be >= 1");
  if (bits_per_table == 0 || bits_per_table > 32) {
    fail(ErrorCode::kInvalidArgument, "bits_per_table must be in [1, 32]");
  }
  if (dimension == 0) fail(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "similarity_threshold must be in (0, 1)");
  }
}

double banded_collision_probability(double cosine, std::size_t bits,
                                    std::size_t tables) {
  const double p = 1.0 - std::acos(std::clamp(cosine, -1.0, 1.0)) / std::numbers::pi;
  return 1.0 - std::pow(1.0 - std::pow(p, static_cast<double>(bits)),
                        static_cast<double>(tables));
}

HyperplaneSet HyperplaneSet::generate(const LshConfig& config) {
  config.validate();
  GaussianSource gauss(config.hyperplane_seed);
  std::vector<double> planes(config.total_bits() * config.dimension);
  for (double& x : planes) x = gauss.next();
  return HyperplaneSet(config.num_tables, config.bits_per_table,
                       config.dimension, std::move(planes));
}

HyperplaneSet::HyperplaneSet(std::size_t num_tables, std::size_t bits_per_table,
                             std::size_t dimension, std::vector<double> planes)
    : num_tables_(num_tables),
      bits_(bits_per_table),
      dimension_(dimension),
      planes_(std::move(planes)) {
  if (bits_ == 0 || bits_ > 32) {
    fail(ErrorCode::kInvalidArgument, "bits_per_table must be in [1, 32]");
  }
  if (planes_.size() != num_tables_ * bits_ * dimension_) {
    fail(ErrorCode::kInvalidArgument, "hyperplane array has wrong size");
  }
}

SimHashSignature signature(const EmbeddingVector& v, const HyperplaneSet& planes) {
  if (v.dimension() != planes.dimension()) {
    fail(ErrorCode::kDimensionMismatch,
         "signature: vector dimension " + std::to_string(v.dimension()) +
             ", hyperplanes " + std::to_string(planes.dimension()));
  }
  SimHashSignature sig;
  sig.bits_per_table = planes.bits_per_table();
  sig.keys.reserve(planes.num_tables());
  const auto x = v.components();
  for (std::size_t t = 0; t < planes.num_tables(); ++t) {
    std::uint32_t key = 0;
    for (std::size_t b = 0; b < planes.bits_per_table(); ++b) {
      const auto p = planes.plane(t, b);
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dot += p[i] * x[i];
      key = (key << 1) | (dot >= 0.0 ? 1u : 0u);
    }
    sig.keys.push_back(key);
  }
  return sig;
}

double bit_agreement(const SimHashSignature& a, const SimHashSignature& b) {
  if (a.bits_per_table != b.bits_per_table || a.keys.size() != b.keys.size() ||
      a.keys.empty()) {
    fail(ErrorCode::kConfigMismatch, "signatures come from different LSH configs");
  }
  std::size_t differing = 0;
  for (std::size_t t = 0; t < a.keys.size(); ++t) {
    differing += static_cast<std::size_t>(std::popcount(a.keys[t] ^ b.keys[t]));
  }
  const double total = static_cast<double>(a.keys.size() * a.bits_per_table);
  return 1.0 - static_cast<double>(differing) / total;
}

double estimate_similarity(const SimHashSignature& a, const SimHashSignature& b) {
  return std::cos(std::numbers::pi * (1.0 - bit_agreement(a, b)));
}

LshIndex::LshIndex(LshConfig config)
    : config_(config),
      planes_(HyperplaneSet::generate(config)),
      tables_(config.num_tables) {}

void LshIndex::check_dimension(const EmbeddingVector& v, const char* op) const {
  if (v.dimension() != config_.dimension) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(op) + ": vector dimension " + std::to_string(v.dimension()) +
             ", index dimension " + std::to_string(config_.dimension));
  }
}

void LshIndex::insert(const ColumnRef& ref, EmbeddingVector v) {
  check_dimension(v, "insert");
  SimHashSignature sig = signature(v, planes_);

  if (auto it = ordinal_of_.find(ref); it != ordinal_of_.end()) {
    const std::uint32_t ordinal = it->second;
    Entry& old = entries_[ordinal];
    log(LogLevel::kInfo, "replacing indexed column " + ref.table_id + "/" +
                             ref.column_name);
    for (std::size_t t = 0; t < tables_.size(); ++t) {
      Bucket& bucket = tables_[t][old.signature.keys[t]];
      std::erase(bucket, ordinal);
      if (bucket.empty()) tables_[t].erase(old.signature.keys[t]);
      tables_[t][sig.keys[t]].push_back(ordinal);
    }
    old = Entry{ref, std::move(v), std::move(sig)};
    return;
  }

  const auto ordinal = static_cast<std::uint32_t>(entries_.size());
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    tables_[t][sig.keys[t]].push_back(ordinal);
  }
  ordinal_of_.emplace(ref, ordinal);
  entries_.push_back(Entry{ref, std::move(v), std::move(sig)});
}

std::vector<std::uint32_t> LshIndex::candidate_ordinals(
    const EmbeddingVector& v) const {
  check_dimension(v, "query_candidates");
  if (entries_.empty()) return {};
  const SimHashSignature sig = signature(v, planes_);
  std::vector<std::uint32_t> out;
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    auto it = tables_[t].find(sig.keys[t]);
    if (it == tables_[t].end()) continue;
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ColumnRef> LshIndex::query_candidates(const EmbeddingVector& v) const {
  std::vector<ColumnRef> out;
  for (std::uint32_t ordinal : candidate_ordinals(v)) {
    out.push_back(entries_[ordinal].ref);
  }
  return out;
}

const LshIndex::Entry* LshIndex::find(const ColumnRef& ref) const {
  auto it = ordinal_of_.find(ref);
  return it == ordinal_of_.end() ? nullptr : &entries_[it->second];
}

std::size_t LshIndex::bucket_entry_total(std::size_t table) const {
  std::size_t total = 0;
  for (const auto& [key, bucket] : tables_.at(table)) total += bucket.size();
  return total;
}

}  // namespace warpgate
