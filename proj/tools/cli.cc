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

#include "cli.h"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "service.h"
#include "warpgate/error.h"
#include "warpgate/eval.h"
#include "warpgate/json_io.h"

namespace warpgate::cli {

namespace {

using nlohmann::json;

// Flags that override the config file.
struct Overrides {
  std::optional<std::size_t> sample_size;
  std::optional<std::string> sample_strategy;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> dim;
  std::optional<std::size_t> tables;
  std::optional<std::size_t> bits;
  std::optional<double> threshold;
};

void add_override_flags(CLI::App* cmd, Overrides& o, bool with_sampling) {
  if (with_sampling) {
    cmd->add_option("--sample-size", o.sample_size, "Values sampled per column");
    cmd->add_option("--sample-strategy", o.sample_strategy, "full, head or reservoir");
  }
  cmd->add_option("--seed", o.seed, "Sampling seed");
  cmd->add_option("--dim", o.dim, "Embedding dimension");
  cmd->add_option("--tables", o.tables, "LSH tables (L)");
  cmd->add_option("--bits", o.bits, "Hyperplanes per LSH table (b)");
  cmd->add_option("--threshold", o.threshold, "Similarity threshold");
}

PipelineConfig effective_config(const std::optional<std::string>& config_path,
                                const Overrides& o) {
  PipelineConfig c = config_path ? load_config_file(*config_path) : PipelineConfig{};
  if (o.sample_size) c.sample.size = *o.sample_size;
  if (o.sample_strategy) c.sample.strategy = parse_sample_strategy(*o.sample_strategy);
  if (o.seed) c.sample.seed = *o.seed;
  if (o.dim) c.embedder.dimension = *o.dim;
  c.lsh.dimension = c.embedder.dimension;
  if (o.tables) c.lsh.num_tables = *o.tables;
  if (o.bits) c.lsh.bits_per_table = *o.bits;
  if (o.threshold) c.lsh.similarity_threshold = *o.threshold;
  c.sample.validate();
  c.embedder.validate();
  c.lsh.validate();
  return c;
}

DatabaseNaming parse_naming(const std::string& text) {
  if (text == "per_subdirectory") return DatabaseNaming::kPerSubdirectory;
  if (text == "flat") return DatabaseNaming::kFlat;
  fail(ErrorCode::kInvalidArgument, "--database-naming must be per_subdirectory or flat");
}

void echo_config(std::ostream& os, const json& config) {
  os << "# effective config: " << config.dump() << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) fail(ErrorCode::kIo, "cannot write " + path.string());
}

std::shared_ptr<Catalog> load_corpus(const std::filesystem::path& root, DatabaseNaming naming,
                                     std::ostream& err) {
  auto catalog = std::make_shared<Catalog>();
  const RegisterReport report = catalog->register_corpus(root, naming);
  for (const auto& r : report.rejected) {
    err << "warning: skipped " << r.path.string() << ": " << r.reason << '\n';
  }
  return catalog;
}

int exit_code(const Error& e) {
  return e.code() == ErrorCode::kIo ? kInternalError : kUserError;
}

}  // namespace

PipelineConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kFileNotFound, "config file not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, "config file " + path.string() + " is not JSON: " + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "sample" && key != "embedder" && key != "lsh") {
      fail(ErrorCode::kInvalidArgument, "unknown config section '" + key + "' in " + path.string());
    }
  }
  PipelineConfig c;
  c.sample = sample_spec_from_json(j.value("sample", json::object()));
  c.embedder = embedder_config_from_json(j.value("embedder", json::object()));
  LshConfig base;
  base.dimension = c.embedder.dimension;
  c.lsh = lsh_config_from_json(j.value("lsh", json::object()), base);
  if (c.lsh.dimension != c.embedder.dimension) {
    fail(ErrorCode::kConfigMismatch, "lsh.dimension must equal embedder.dimension");
  }
  return c;
}

json config_to_json(const PipelineConfig& c) {
  return {{"sample", sample_spec_to_json(c.sample)},
          {"embedder", embedder_config_to_json(c.embedder)},
          {"lsh", lsh_config_to_json(c.lsh)}};
}

std::filesystem::path manifest_path(const std::filesystem::path& index_path) {
  return index_path.string() + ".manifest.json";
}

OpenedIndex open_index(const std::filesystem::path& index_path,
                       const std::optional<std::filesystem::path>& corpus_override) {
  LoadedIndex loaded = load_index(index_path);
  const auto sidecar = manifest_path(index_path);
  std::ifstream in(sidecar, std::ios::binary);
  if (!in) fail(ErrorCode::kFileNotFound, "index manifest not found: " + sidecar.string());
  IndexManifest recorded;
  try {
    recorded = manifest_from_json(json::parse(in));
  } catch (const json::exception& e) {
    fail(ErrorCode::kCorruptFile, "unreadable index manifest " + sidecar.string() + ": " + e.what());
  }
  const auto embedder = std::make_shared<HashingEmbedder>(
      embedder_config_from_json(json::parse(loaded.info.embedder)));
  OpenedIndex out;
  auto catalog = std::make_shared<Catalog>();
  catalog->register_corpus(corpus_override.value_or(recorded.corpus_root),
                           recorded.database_naming);
  out.catalog = catalog;
  out.engine = std::make_shared<const DiscoveryEngine>(
      DiscoveryEngine::open(catalog, std::move(loaded), embedder, &recorded));
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        std::optional<std::string> env_config, std::optional<std::string> env_addr) {
  CLI::App app{"warpgate: joinable column discovery over table corpora", "warpgate"};
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON config file (default: $WARPGATE_CONFIG)");

  // index
  auto* index_cmd = app.add_subcommand("index", "Build an index over a corpus directory");
  std::string index_corpus, index_out, index_naming = "per_subdirectory";
  Overrides index_over;
  index_cmd->add_option("--corpus", index_corpus, "Corpus root directory")->required();
  index_cmd->add_option("--out", index_out, "Index file to write")->required();
  index_cmd->add_option("--database-naming", index_naming, "per_subdirectory or flat");
  add_override_flags(index_cmd, index_over, true);

  // search
  auto* search_cmd = app.add_subcommand("search", "Top-k joinable columns for one column");
  std::string search_index, search_table, search_column;
  std::optional<std::string> search_corpus;
  std::size_t search_k = SearchParams{}.k;
  std::optional<double> search_min_score;
  bool search_json = false, search_include_table = false;
  search_cmd->add_option("--index", search_index, "Index file")->required();
  search_cmd->add_option("--table", search_table, "Query table: id, database.name or name")
      ->required();
  search_cmd->add_option("--column", search_column, "Query column name")->required();
  search_cmd->add_option("--k", search_k, "Number of results");
  search_cmd->add_option("--min-score", search_min_score,
                         "Minimum score (default: the index threshold)");
  search_cmd->add_option("--corpus", search_corpus, "Override the corpus root from the manifest");
  search_cmd->add_flag("--include-query-table", search_include_table,
                       "Also return other columns of the query table");
  search_cmd->add_flag("--json", search_json, "Machine-readable output only");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Sampling ablation against a ground-truth CSV");
  std::string eval_corpus, eval_truth, eval_naming = "per_subdirectory";
  std::vector<std::size_t> eval_ks = {1, 3, 5, 10};
  std::vector<std::size_t> eval_sizes = {10, 100, 1000};
  std::optional<std::string> eval_report;
  std::size_t eval_reps = 3;
  Overrides eval_over;
  eval_cmd->add_option("--corpus", eval_corpus, "Corpus root directory")->required();
  eval_cmd->add_option("--truth", eval_truth, "Ground-truth CSV")->required();
  eval_cmd->add_option("--ks", eval_ks, "Cutoffs, comma separated")->delimiter(',');
  eval_cmd->add_option("--sample-sizes", eval_sizes, "Sample sizes, comma separated")
      ->delimiter(',');
  eval_cmd->add_option("--report", eval_report, "Write the report here (.json or .csv)");
  eval_cmd->add_option("--repetitions", eval_reps, "Timed passes per configuration");
  eval_cmd->add_option("--database-naming", eval_naming, "per_subdirectory or flat");
  add_override_flags(eval_cmd, eval_over, false);

  // gen-testbed
  auto* gen_cmd = app.add_subcommand("gen-testbed", "Write a seeded synthetic corpus");
  std::string gen_out;
  TestbedSpec gen_spec;
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();
  gen_cmd->add_option("--tables", gen_spec.num_tables, "Tables");
  gen_cmd->add_option("--cols", gen_spec.columns_per_table, "Columns per table");
  gen_cmd->add_option("--rows", gen_spec.rows_per_table, "Rows per table");
  gen_cmd->add_option("--pairs", gen_spec.planted_pairs, "Planted joinable pairs");
  gen_cmd->add_option("--databases", gen_spec.num_databases, "Databases");
  gen_cmd->add_option("--seed", gen_spec.seed, "Seed");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  std::optional<std::string> serve_index, serve_corpus, serve_addr;
  std::string serve_naming = "per_subdirectory";
  serve_cmd->add_option("--index", serve_index, "Index file to load at startup");
  serve_cmd->add_option("--corpus", serve_corpus, "Corpus to load at startup");
  serve_cmd->add_option("--database-naming", serve_naming, "per_subdirectory or flat");
  serve_cmd->add_option("--addr", serve_addr, "host:port (default: $WARPGATE_ADDR or 127.0.0.1:8080)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }
  if (!config_path) config_path = env_config;

  try {
    if (*index_cmd) {
      const PipelineConfig config = effective_config(config_path, index_over);
      const DatabaseNaming naming = parse_naming(index_naming);
      echo_config(out, config_to_json(config));
      auto catalog = load_corpus(index_corpus, naming, err);
      const auto engine = DiscoveryEngine::build(
          catalog, config.sample, std::make_shared<HashingEmbedder>(config.embedder), config.lsh);
      engine.save(index_out);
      write_text(manifest_path(index_out), manifest_to_json(engine.manifest()).dump(2) + "\n");
      const auto& m = engine.manifest();
      out << "indexed " << m.columns_indexed << " of " << m.total_columns << " columns in "
          << m.tables_indexed << " tables (" << m.skipped.size() << " skipped) in "
          << std::fixed << std::setprecision(3) << m.build_seconds << " s\n"
          << "wrote " << index_out << "\n"
          << "wrote " << manifest_path(index_out).string() << "\n";
      return kOk;
    }

    if (*search_cmd) {
      SearchParams params;
      params.k = search_k;
      params.min_score = search_min_score;
      params.exclude_query_table = !search_include_table;
      params.validate();
      const OpenedIndex opened = open_index(
          search_index, search_corpus ? std::optional<std::filesystem::path>(*search_corpus)
                                      : std::nullopt);
      const auto& engine = *opened.engine;
      const auto& m = engine.manifest();
      json config = {{"sample", sample_spec_to_json(m.sample)},
                     {"embedder", json::parse(m.embedder)},
                     {"lsh", lsh_config_to_json(m.lsh)},
                     {"search",
                      {{"k", params.k},
                       {"min_score", params.min_score.value_or(engine.default_min_score())},
                       {"exclude_query_table", params.exclude_query_table}}}};
      echo_config(search_json ? err : out, config);
      const Catalog& catalog = engine.catalog();
      const ColumnRef query =
          catalog.column_ref(catalog.resolve_table(search_table).table_id, search_column);
      const SearchResult result = engine.search(query, params);
      if (search_json) {
        out << candidates_to_json(result.candidates).dump() << '\n';
        return kOk;
      }
      out << "query " << search_table << "." << search_column << ": "
          << result.candidates.size() << " candidates in " << std::fixed
          << std::setprecision(3) << result.timing.end_to_end_seconds * 1e3 << " ms\n";
      std::size_t rank = 1;
      for (const auto& c : result.candidates) {
        out << std::setw(3) << rank++ << "  " << std::setprecision(4) << round_score(c.score)
            << "  " << c.database << "." << c.table_name << "." << c.column.column_name << '\n';
      }
      return kOk;
    }

    if (*eval_cmd) {
      const PipelineConfig config = effective_config(config_path, eval_over);
      AblationConfig ablation;
      ablation.sizes.assign(eval_sizes.begin(), eval_sizes.end());
      ablation.ks = eval_ks;
      ablation.sample_seed = config.sample.seed;
      ablation.lsh = config.lsh;
      ablation.timing_repetitions = eval_reps;
      json echoed = config_to_json(config);
      echoed["eval"] = {{"ks", eval_ks}, {"sample_sizes", eval_sizes}, {"repetitions", eval_reps}};
      echo_config(out, echoed);
      auto catalog = load_corpus(eval_corpus, parse_naming(eval_naming), err);
      const GroundTruthSet truth = load_ground_truth(eval_truth, *catalog);
      for (const auto& w : truth.warnings) err << "warning: " << w << '\n';
      const auto result = sampling_ablation(
          catalog, std::make_shared<HashingEmbedder>(config.embedder), truth, ablation);
      out << ablation_to_text(result);
      if (eval_report) {
        const std::filesystem::path report(*eval_report);
        write_text(report, report.extension() == ".csv" ? ablation_to_csv(result)
                                                        : ablation_to_json(result).dump(2) + "\n");
        out << "wrote " << report.string() << '\n';
      }
      return kOk;
    }

    if (*gen_cmd) {
      gen_spec.validate();
      echo_config(out, {{"testbed",
                         {{"tables", gen_spec.num_tables},
                          {"cols", gen_spec.columns_per_table},
                          {"rows", gen_spec.rows_per_table},
                          {"pairs", gen_spec.planted_pairs},
                          {"databases", gen_spec.num_databases},
                          {"seed", gen_spec.seed}}}});
      const Testbed bed = generate_testbed(gen_spec, gen_out);
      out << "planted " << bed.pairs.size() << " pairs\n"
          << "corpus " << bed.corpus_root.string() << "\n"
          << "truth " << bed.truth_path.string() << "\n";
      return kOk;
    }

    if (*serve_cmd) {
      const std::string address = serve_addr.value_or(env_addr.value_or("127.0.0.1:8080"));
      const auto [host, port] = service::parse_address(address);
      service::Service svc;
      json echoed = {{"addr", address}};
      if (serve_index) {
        const OpenedIndex opened = open_index(
            *serve_index, serve_corpus ? std::optional<std::filesystem::path>(*serve_corpus)
                                       : std::nullopt);
        const auto& m = opened.engine->manifest();
        echoed["sample"] = sample_spec_to_json(m.sample);
        echoed["embedder"] = json::parse(m.embedder);
        echoed["lsh"] = lsh_config_to_json(m.lsh);
        svc.install(opened.catalog, opened.engine);
      } else if (serve_corpus) {
        const DatabaseNaming naming = parse_naming(serve_naming);
        svc.install(load_corpus(*serve_corpus, naming, err), nullptr);
      }
      echo_config(out, echoed);
      out << "listening on " << host << ":" << port << std::endl;
      if (!svc.serve(host, port)) {
        err << "error: cannot bind " << address << '\n';
        return kUserError;
      }
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kUserError;
}

int main(int argc, const char* const* argv) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  return run(argc, argv, std::cout, std::cerr, env("WARPGATE_CONFIG"), env("WARPGATE_ADDR"));
}

}  // namespace warpgate::cli
