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

#include "warpgate/embedder.h"

#include <algorithm>
#include <cmath>

#include "warpgate/error.h"
#include "warpgate/json_io.h"
#include "warpgate/random.h"

namespace warpgate {

namespace {

double l2(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

// Byte offsets of UTF-8 code point starts, plus the end offset.
void code_point_offsets(std::string_view s, std::vector<std::size_t>& out) {
  out.clear();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) out.push_back(i);
  }
  out.push_back(s.size());
}

// Adds the normalized signed n-gram histogram of `value` to `acc`.
// Returns false (and leaves acc untouched) if the histogram is zero.
bool accumulate_value(std::string_view value, const EmbedderConfig& config,
                      std::vector<double>& scratch,
                      std::vector<std::size_t>& offsets, std::string& lowered,
                      std::span<double> acc) {
  if (is_null_marker(value)) return false;
  if (config.lowercase) {
    lowered.assign(value);
    for (char& c : lowered) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    value = lowered;
  }
  code_point_offsets(value, offsets);
  const std::size_t points = offsets.size() - 1;

  std::fill(scratch.begin(), scratch.end(), 0.0);
  bool any = false;
  for (std::size_t n = config.ngram_min; n <= config.ngram_max && n <= points; ++n) {
    for (std::size_t i = 0; i + n <= points; ++i) {
      const std::string_view gram =
          value.substr(offsets[i], offsets[i + n] - offsets[i]);
      const std::uint64_t h = seeded_fnv1a(gram, config.hash_seed);
      scratch[h % config.dimension] += (h >> 63) ? -1.0 : 1.0;
      any = true;
    }
  }
  if (!any) return false;
  const double norm = l2(scratch);
  if (norm == 0.0) return false;
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scratch[i] / norm;
  return true;
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> components)
    : components_(std::move(components)), norm_(l2(components_)) {}

EmbeddingVector EmbeddingVector::zeros(std::size_t dimension) {
  return EmbeddingVector(std::vector<double>(dimension, 0.0));
}

EmbeddingVector EmbeddingVector::scaled(double factor) const {
  std::vector<double> out(components_);
  for (double& x : out) x *= factor;
  return EmbeddingVector(std::move(out));
}

EmbeddingVector EmbeddingVector::normalized() const {
  if (is_zero()) return *this;
  std::vector<double> out(components_);
  for (double& x : out) x /= norm_;
  return EmbeddingVector(std::move(out));
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dimension() != v.dimension()) {
    fail(ErrorCode::kDimensionMismatch,
         "cosine: dimension " + std::to_string(u.dimension()) + " vs " +
             std::to_string(v.dimension()));
  }
  if (u.is_zero() || v.is_zero()) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < u.dimension(); ++i) dot += u[i] * v[i];
  return std::clamp(dot / (u.norm() * v.norm()), -1.0, 1.0);
}

void EmbedderConfig::validate() const {
  if (dimension < 8) {
    fail(ErrorCode::kInvalidArgument, "embedder dimension must be >= 8");
  }
  if (ngram_min < 1 || ngram_min > ngram_max) {
    fail(ErrorCode::kInvalidArgument,
         "embedder n-gram range must satisfy 1 <= ngram_min <= ngram_max");
  }
}

HashingEmbedder::HashingEmbedder(EmbedderConfig config)
    : config_(std::move(config)) {
  config_.validate();
}

EmbeddingVector HashingEmbedder::embed_value(std::string_view value) const {
  std::vector<double> acc(config_.dimension, 0.0);
  std::vector<double> scratch(config_.dimension);
  std::vector<std::size_t> offsets;
  std::string lowered;
  accumulate_value(value, config_, scratch, offsets, lowered, acc);
  return EmbeddingVector(std::move(acc));
}

EmbeddingVector HashingEmbedder::embed_column(
    std::span<const std::string> values) const {
  std::vector<std::string_view> distinct;
  distinct.reserve(values.size());
  for (const auto& v : values) {
    if (!is_null_marker(v)) distinct.emplace_back(v);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.empty()) return EmbeddingVector::zeros(config_.dimension);

  std::vector<double> acc(config_.dimension, 0.0);
  std::vector<double> scratch(config_.dimension);
  std::vector<std::size_t> offsets;
  std::string lowered;
  for (std::string_view v : distinct) {
    accumulate_value(v, config_, scratch, offsets, lowered, acc);
  }
  const auto count = static_cast<double>(distinct.size());
  for (double& x : acc) x /= count;
  const double norm = l2(acc);
  if (norm == 0.0) return EmbeddingVector::zeros(config_.dimension);
  for (double& x : acc) x /= norm;
  return EmbeddingVector(std::move(acc));
}

std::string HashingEmbedder::describe() const {
  return embedder_config_to_json(config_).dump();
}

EmbeddingVector embed_value(std::string_view value,
                            const EmbedderConfig& config) {
  return HashingEmbedder(config).embed_value(value);
}

EmbeddingVector embed_column(const ColumnValues& values,
                             const EmbedderConfig& config) {
  return HashingEmbedder(config).embed_column(values.values);
}

double joinability(const ColumnValues& a, const ColumnValues& b,
                   const EmbedderConfig& config) {
  const HashingEmbedder embedder(config);
  return cosine(embedder.embed_column(a.values), embedder.embed_column(b.values));
}

}  // namespace warpgate
