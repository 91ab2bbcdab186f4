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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warpgate/corpus.h"

namespace warpgate {

/// Dense real vector with its L2 norm cached at construction.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> components);

  static EmbeddingVector zeros(std::size_t dimension);

  std::span<const double> components() const noexcept { return components_; }
  std::size_t dimension() const noexcept { return components_.size(); }
  double norm() const noexcept { return norm_; }
  bool is_zero() const noexcept { return norm_ == 0.0; }
  double operator[](std::size_t i) const noexcept { return components_[i]; }

  EmbeddingVector scaled(double factor) const;
  EmbeddingVector normalized() const;

  bool operator==(const EmbeddingVector& other) const {
    return components_ == other.components_;
  }

 private:
  std::vector<double> components_;
  double norm_ = 0.0;
};

/// dot(u, v) / (|u| |v|), clamped to [-1, 1]; 0 when either vector is zero.
/// Throws DimensionMismatch.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

/// Column embedding function. The discovery engine depends only on this
/// interface, so alternative models slot in without engine changes.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::size_t dimension() const = 0;

  /// Embeds a column from its (sampled) values. Null markers are ignored;
  /// returns the zero vector when nothing remains.
  virtual EmbeddingVector embed_column(
      std::span<const std::string> values) const = 0;

  /// Canonical JSON describing the model and its parameters. Stored in index
  /// files; two embedders are interchangeable iff their descriptions match.
  virtual std::string describe() const = 0;
};

struct EmbedderConfig {
  std::size_t dimension = 128;
  std::size_t ngram_min = 2;
  std::size_t ngram_max = 3;
  std::uint64_t hash_seed = 42;
  bool lowercase = true;

  void validate() const;
  bool operator==(const EmbedderConfig&) const = default;
};

/// Signed feature hashing of character n-grams.
///
/// A value is split into UTF-8 code points (ASCII A-Z lowered first when
/// `lowercase`). Every n-gram of ngram_min..ngram_max code points is hashed
/// with seeded_fnv1a(bytes, hash_seed) = h; bucket h % dimension receives
/// +1 if bit 63 of h is clear, -1 otherwise. The bucket vector is then
/// L2-normalized.
///
/// A column is embedded as the normalized mean of its distinct values'
/// vectors, summed in lexicographic value order so the result is bitwise
/// independent of input order and multiplicity.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(EmbedderConfig config = {});

  const EmbedderConfig& config() const noexcept { return config_; }

  std::size_t dimension() const override { return config_.dimension; }
  EmbeddingVector embed_value(std::string_view value) const;
  EmbeddingVector embed_column(
      std::span<const std::string> values) const override;
  std::string describe() const override;

 private:
  EmbedderConfig config_;
};

EmbeddingVector embed_value(std::string_view value, const EmbedderConfig& config);
EmbeddingVector embed_column(const ColumnValues& values,
                             const EmbedderConfig& config);

/// cosine(embed_column(a), embed_column(b)).
double joinability(const ColumnValues& a, const ColumnValues& b,
                   const EmbedderConfig& config);

}  // namespace warpgate
