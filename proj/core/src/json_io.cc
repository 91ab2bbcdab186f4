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

#include "warpgate/json_io.h"

#include <cmath>
#include <initializer_list>
#include <string_view>

#include "warpgate/error.h"

namespace warpgate {
namespace {

void check_keys(const nlohmann::json& j, std::string_view what,
                std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + " must be a JSON object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto key : allowed) ok = ok || it.key() == key;
    if (!ok) {
      fail(ErrorCode::kInvalidArgument,
           "unknown key '" + it.key() + "' in " + std::string(what));
    }
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, std::string_view what) {
  auto it = j.find(key);
  if (it == j.end()) return;
  const std::string field = std::string(what) + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) fail(ErrorCode::kInvalidArgument, field + " must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer() || it->template get<std::int64_t>() < 0) {
      fail(ErrorCode::kInvalidArgument, field + " must be a non-negative integer");
    }
  } else {
    if (!it->is_number()) fail(ErrorCode::kInvalidArgument, field + " must be a number");
  }
  out = it->get<T>();
}

}  // namespace

nlohmann::json sample_spec_to_json(const SampleSpec& spec) {
  return {{"strategy", std::string(to_string(spec.strategy))},
          {"size", spec.size},
          {"seed", spec.seed}};
}

nlohmann::json embedder_config_to_json(const EmbedderConfig& config) {
  return {{"kind", "hashing"},
          {"dimension", config.dimension},
          {"ngram_min", config.ngram_min},
          {"ngram_max", config.ngram_max},
          {"hash_seed", config.hash_seed},
          {"lowercase", config.lowercase}};
}

nlohmann::json lsh_config_to_json(const LshConfig& config) {
  return {{"num_tables", config.num_tables},
          {"bits_per_table", config.bits_per_table},
          {"dimension", config.dimension},
          {"hyperplane_seed", config.hyperplane_seed},
          {"similarity_threshold", config.similarity_threshold}};
}

SampleSpec sample_spec_from_json(const nlohmann::json& j, SampleSpec base) {
  check_keys(j, "sample", {"strategy", "size", "seed"});
  if (auto it = j.find("strategy"); it != j.end()) {
    if (!it->is_string()) {
      fail(ErrorCode::kInvalidArgument, "sample.strategy must be a string");
    }
    base.strategy = parse_sample_strategy(it->get<std::string>());
  }
  read(j, "size", base.size, "sample");
  read(j, "seed", base.seed, "sample");
  base.validate();
  return base;
}

EmbedderConfig embedder_config_from_json(const nlohmann::json& j,
                                         EmbedderConfig base) {
  check_keys(j, "embedder",
             {"kind", "dimension", "ngram_min", "ngram_max", "hash_seed", "lowercase"});
  if (auto it = j.find("kind"); it != j.end() && *it != "hashing") {
    fail(ErrorCode::kInvalidArgument, "embedder.kind must be \"hashing\"");
  }
  read(j, "dimension", base.dimension, "embedder");
  read(j, "ngram_min", base.ngram_min, "embedder");
  read(j, "ngram_max", base.ngram_max, "embedder");
  read(j, "hash_seed", base.hash_seed, "embedder");
  read(j, "lowercase", base.lowercase, "embedder");
  base.validate();
  return base;
}

LshConfig lsh_config_from_json(const nlohmann::json& j, LshConfig base) {
  check_keys(j, "lsh",
             {"num_tables", "bits_per_table", "dimension", "hyperplane_seed",
              "similarity_threshold"});
  read(j, "num_tables", base.num_tables, "lsh");
  read(j, "bits_per_table", base.bits_per_table, "lsh");
  read(j, "dimension", base.dimension, "lsh");
  read(j, "hyperplane_seed", base.hyperplane_seed, "lsh");
  read(j, "similarity_threshold", base.similarity_threshold, "lsh");
  base.validate();
  return base;
}

double round_score(double score) { return std::round(score * 1e4) / 1e4; }

}  // namespace warpgate
