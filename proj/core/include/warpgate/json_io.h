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

// JSON encodings shared by the index file, the CLI and the HTTP service.

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "warpgate/corpus.h"
#include "warpgate/embedder.h"
#include "warpgate/simhash.h"

namespace warpgate {

nlohmann::json sample_spec_to_json(const SampleSpec& spec);
nlohmann::json embedder_config_to_json(const EmbedderConfig& config);
nlohmann::json lsh_config_to_json(const LshConfig& config);

// Parsers start from `base` and override only the keys present, so partial
// documents layer over defaults. Unknown keys and wrong types throw
// InvalidArgument.
SampleSpec sample_spec_from_json(const nlohmann::json& j, SampleSpec base = {});
EmbedderConfig embedder_config_from_json(const nlohmann::json& j,
                                         EmbedderConfig base = {});
LshConfig lsh_config_from_json(const nlohmann::json& j, LshConfig base = {});

/// Scores on the wire carry exactly four decimal places.
double round_score(double score);

}  // namespace warpgate
