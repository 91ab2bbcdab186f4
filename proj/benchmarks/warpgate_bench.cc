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

// Microbenchmarks for the hot paths: value and column embedding, SimHash
// signatures, index build and top-k search against the brute-force scan.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "warpgate/error.h"
#include "warpgate/eval.h"
#include "warpgate/random.h"
#include "warpgate/simhash.h"

namespace wg = warpgate;

namespace {

std::vector<std::string> random_values(std::size_t n, std::uint64_t seed) {
  wg::SplitMix64 rng(seed);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string v;
    const std::size_t len = 6 + rng.bounded(14);
    for (std::size_t c = 0; c < len; ++c) v.push_back(static_cast<char>('a' + rng.bounded(26)));
    out.push_back(std::move(v));
  }
  return out;
}

// The standard synthetic testbed, generated once per process.
struct Corpus {
  std::shared_ptr<wg::Catalog> catalog;
  std::vector<wg::ColumnRef> queries;

  static const Corpus& get() {
    static const Corpus corpus = [] {
      wg::set_log_level(wg::LogLevel::kError);
      const auto dir = std::filesystem::temp_directory_path() / "warpgate_bench_corpus";
      std::filesystem::remove_all(dir);
      const auto bed = wg::generate_testbed(wg::TestbedSpec{}, dir);
      Corpus c;
      c.catalog = std::make_shared<wg::Catalog>();
      c.catalog->register_corpus(bed.corpus_root, wg::DatabaseNaming::kPerSubdirectory);
      c.queries = c.catalog->all_columns();
      return c;
    }();
    return corpus;
  }
};

void BM_EmbedValue(benchmark::State& state) {
  const wg::HashingEmbedder embedder;
  const std::string value = "Alice Smith, 42 Rue de Rivoli";
  for (auto _ : state) benchmark::DoNotOptimize(embedder.embed_value(value));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * value.size()));
}
BENCHMARK(BM_EmbedValue);

void BM_EmbedColumn(benchmark::State& state) {
  const wg::HashingEmbedder embedder;
  const auto values = random_values(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(embedder.embed_column(values));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * values.size()));
}
BENCHMARK(BM_EmbedColumn)->Arg(10)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Signature(benchmark::State& state) {
  wg::LshConfig config;
  config.num_tables = static_cast<std::size_t>(state.range(0));
  const auto planes = wg::HyperplaneSet::generate(config);
  const auto vector = wg::HashingEmbedder().embed_column(random_values(100, 2));
  for (auto _ : state) benchmark::DoNotOptimize(wg::signature(vector, planes));
  state.counters["bits"] = static_cast<double>(config.num_tables * config.bits_per_table);
}
BENCHMARK(BM_Signature)->Arg(16)->Arg(32)->Arg(64);

void BM_BuildIndex(benchmark::State& state) {
  const auto& corpus = Corpus::get();
  const auto embedder = std::make_shared<wg::HashingEmbedder>();
  wg::SampleSpec sample;
  sample.size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        wg::DiscoveryEngine::build(corpus.catalog, sample, embedder, wg::LshConfig{}));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * corpus.queries.size()));
}
BENCHMARK(BM_BuildIndex)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SearchTopK(benchmark::State& state) {
  const auto& corpus = Corpus::get();
  wg::SampleSpec sample;
  sample.size = static_cast<std::size_t>(state.range(0));
  const auto engine = wg::DiscoveryEngine::build(
      corpus.catalog, sample, std::make_shared<wg::HashingEmbedder>(), wg::LshConfig{});
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& query = corpus.queries[i++ % corpus.queries.size()];
    benchmark::DoNotOptimize(engine.search_topk(query, wg::SearchParams{}));
  }
}
BENCHMARK(BM_SearchTopK)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_BruteForceTopK(benchmark::State& state) {
  const auto& corpus = Corpus::get();
  const wg::BruteForceOracle oracle(corpus.catalog, std::make_shared<wg::HashingEmbedder>(),
                                    wg::SampleSpec{});
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& query = corpus.queries[i++ % corpus.queries.size()];
    benchmark::DoNotOptimize(oracle.topk(query, wg::SearchParams{}));
  }
}
BENCHMARK(BM_BruteForceTopK)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
