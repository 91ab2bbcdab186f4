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

// Command-line entry point: index, search, eval, gen-testbed, serve.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "warpgate/corpus.h"
#include "warpgate/embedder.h"
#include "warpgate/engine.h"
#include "warpgate/simhash.h"

namespace warpgate::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUserError = 1;
inline constexpr int kInternalError = 2;

/// Build-time configuration shared by index and eval. A config file is JSON
/// with optional "sample", "embedder" and "lsh" objects; lsh.dimension
/// always follows embedder.dimension.
struct PipelineConfig {
  SampleSpec sample;
  EmbedderConfig embedder;
  LshConfig lsh;
};

PipelineConfig load_config_file(const std::filesystem::path& path);
nlohmann::json config_to_json(const PipelineConfig& config);

/// "<index>.manifest.json": corpus root, naming, counts and timestamps that
/// the index file itself leaves out to stay byte-reproducible.
std::filesystem::path manifest_path(const std::filesystem::path& index_path);

struct OpenedIndex {
  std::shared_ptr<const Catalog> catalog;
  std::shared_ptr<const DiscoveryEngine> engine;
};

/// Loads an index file, reloads its corpus (from the manifest sidecar unless
/// `corpus_override` is given) and attaches the two.
OpenedIndex open_index(const std::filesystem::path& index_path,
                       const std::optional<std::filesystem::path>& corpus_override = {});

/// Runs one invocation. `env_config` and `env_addr` stand in for the
/// WARPGATE_CONFIG and WARPGATE_ADDR environment variables.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        std::optional<std::string> env_config = {}, std::optional<std::string> env_addr = {});

/// run() with the real environment.
int main(int argc, const char* const* argv);

}  // namespace warpgate::cli
