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

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "service.h"
#include "test_util.h"

namespace warpgate::cli {
namespace {

using nlohmann::json;
using testing::read_file;
using testing::ScratchDir;
using testing::write_file;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args, std::optional<std::string> env_config = {},
            std::optional<std::string> env_addr = {}) {
  args.insert(args.begin(), "warpgate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err, std::move(env_config),
               std::move(env_addr));
  r.out = out.str();
  r.err = err.str();
  return r;
}

// The JSON on the "# effective config:" header line.
json echoed_config(const std::string& text) {
  const std::string marker = "# effective config: ";
  const auto pos = text.find(marker);
  if (pos == std::string::npos) return nullptr;
  const auto end = text.find('\n', pos);
  return json::parse(text.substr(pos + marker.size(), end - pos - marker.size()));
}

TEST(Cli, SearchOnMissingIndexNamesThePath) {
  const auto r = run_cli({"search", "--index", "/nonexistent/x.idx", "--table", "t", "--column",
                          "c"});
  EXPECT_EQ(r.code, kUserError);
  EXPECT_NE(r.err.find("/nonexistent/x.idx"), std::string::npos) << r.err;
}

TEST(Cli, UnknownFlagPrintsUsage) {
  const auto r = run_cli({"index", "--corpus", "c", "--out", "o", "--bogus"});
  EXPECT_EQ(r.code, kUserError);
  EXPECT_NE((r.out + r.err).find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({}).code, kUserError);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUserError);
}

TEST(Cli, HelpSucceeds) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, kOk);
  for (const char* cmd : {"index", "search", "eval", "gen-testbed", "serve"}) {
    EXPECT_NE(r.out.find(cmd), std::string::npos) << cmd;
  }
}

TEST(Cli, InvalidValuesAreUserErrors) {
  ScratchDir dir;
  write_file(dir / "corpus/d/t.csv", "a\nxx\nyy\n");
  const std::string corpus = (dir / "corpus").string();
  const std::string out = (dir / "x.idx").string();
  EXPECT_EQ(run_cli({"index", "--corpus", corpus, "--out", out, "--bits", "99"}).code,
            kUserError);
  EXPECT_EQ(run_cli({"index", "--corpus", corpus, "--out", out, "--sample-strategy", "magic"})
                .code,
            kUserError);
  EXPECT_EQ(run_cli({"index", "--corpus", (dir / "none").string(), "--out", out}).code,
            kUserError);
  EXPECT_EQ(run_cli({"gen-testbed", "--out", (dir / "tb").string(), "--tables", "1", "--pairs",
                     "5"})
                .code,
            kUserError);
  EXPECT_EQ(run_cli({"serve", "--addr", "nocolon"}).code, kUserError);
}

TEST(Cli, ConfigPrecedenceFlagsOverFileOverDefaults) {
  ScratchDir dir;
  write_file(dir / "corpus/d/t.csv", "a,b\nalpha,one\nbeta,two\ngamma,three\n");
  write_file(dir / "cfg.json",
             R"({"sample": {"size": 50}, "lsh": {"num_tables": 16, "bits_per_table": 4}})");
  const std::string corpus = (dir / "corpus").string();
  const std::string cfg = (dir / "cfg.json").string();

  auto r = run_cli({"--config", cfg, "index", "--corpus", corpus, "--out",
                    (dir / "a.idx").string(), "--tables", "8"});
  ASSERT_EQ(r.code, kOk) << r.err;
  json c = echoed_config(r.out);
  EXPECT_EQ(c["sample"]["size"], 50);          // file
  EXPECT_EQ(c["sample"]["seed"], 42);          // default
  EXPECT_EQ(c["lsh"]["num_tables"], 8);        // flag
  EXPECT_EQ(c["lsh"]["bits_per_table"], 4);    // file
  EXPECT_EQ(c["lsh"]["similarity_threshold"], 0.7);

  // The environment variable stands in for --config; the flag wins over it.
  r = run_cli({"index", "--corpus", corpus, "--out", (dir / "b.idx").string()}, cfg);
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(echoed_config(r.out)["lsh"]["num_tables"], 16);
  write_file(dir / "other.json", R"({"sample": {"size": 7}})");
  r = run_cli({"--config", (dir / "other.json").string(), "index", "--corpus", corpus, "--out",
               (dir / "c.idx").string()},
              cfg);
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(echoed_config(r.out)["sample"]["size"], 7);
  EXPECT_EQ(echoed_config(r.out)["lsh"]["num_tables"], LshConfig{}.num_tables);

  // --dim drives both the embedder and the LSH dimension.
  r = run_cli({"index", "--corpus", corpus, "--out", (dir / "d.idx").string(), "--dim", "64"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(echoed_config(r.out)["embedder"]["dimension"], 64);
  EXPECT_EQ(echoed_config(r.out)["lsh"]["dimension"], 64);
}

TEST(Cli, BadConfigFiles) {
  ScratchDir dir;
  write_file(dir / "corpus/d/t.csv", "a\nxx\n");
  const std::string corpus = (dir / "corpus").string();
  write_file(dir / "unknown.json", R"({"search": {}})");
  write_file(dir / "broken.json", "{");
  write_file(dir / "dims.json", R"({"embedder": {"dimension": 64}, "lsh": {"dimension": 32}})");
  for (const char* name : {"unknown.json", "broken.json", "dims.json", "missing.json"}) {
    const auto r = run_cli({"--config", (dir / name).string(), "index", "--corpus", corpus,
                            "--out", (dir / "x.idx").string()});
    EXPECT_EQ(r.code, kUserError) << name;
    EXPECT_FALSE(r.err.empty()) << name;
  }
}

// gen-testbed, index, search and eval on the default synthetic corpus.
class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ScratchDir("pipeline");
    const auto gen = run_cli({"gen-testbed", "--out", (*dir_ / "tb").string(), "--tables", "10",
                              "--cols", "5", "--rows", "1000", "--pairs", "20", "--seed", "7"});
    ASSERT_EQ(gen.code, kOk) << gen.err;
    ASSERT_NE(gen.out.find("planted 20 pairs"), std::string::npos) << gen.out;
    EXPECT_EQ(echoed_config(gen.out)["testbed"]["seed"], 7);
    corpus_ = (*dir_ / "tb/corpus").string();
    truth_ = (*dir_ / "tb/ground_truth.csv").string();
    index_ = (*dir_ / "tb.idx").string();
    const auto idx = run_cli({"index", "--corpus", corpus_, "--out", index_});
    ASSERT_EQ(idx.code, kOk) << idx.err;
  }
  static void TearDownTestSuite() { delete dir_; }

  static inline ScratchDir* dir_ = nullptr;
  static inline std::string corpus_, truth_, index_;
};

TEST_F(CliPipeline, IndexTwiceGivesIdenticalFiles) {
  const std::string again = (*dir_ / "again.idx").string();
  ASSERT_EQ(run_cli({"index", "--corpus", corpus_, "--out", again}).code, kOk);
  EXPECT_EQ(read_file(index_), read_file(again));
  const json manifest = json::parse(read_file(manifest_path(index_)));
  EXPECT_EQ(manifest["columns_indexed"], 50);
  EXPECT_EQ(manifest["database_naming"], "per_subdirectory");
  EXPECT_FALSE(manifest["built_at"].get<std::string>().empty());
}

TEST_F(CliPipeline, SearchJsonIsMachineReadableAndMatchesService) {
  const auto r = run_cli({"search", "--index", index_, "--table", "crm.orders_01", "--column",
                          "site_0", "--k", "3", "--min-score", "0", "--json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json cli_json = json::parse(r.out);  // stdout holds only the JSON document
  ASSERT_EQ(cli_json.size(), 3u);
  EXPECT_EQ(cli_json[0]["table"], "shipments_05");
  EXPECT_EQ(cli_json[0]["column"], "site_1");
  EXPECT_DOUBLE_EQ(cli_json[0]["score"].get<double>(), 0.9787);
  EXPECT_EQ(echoed_config(r.err)["search"]["k"], 3);

  const OpenedIndex opened = open_index(index_);
  service::Service svc;
  svc.install(opened.catalog, opened.engine);
  const auto http = svc.handle({"POST", "/search", {},
                                json{{"table_id", "crm.orders_01"},
                                     {"column_name", "site_0"},
                                     {"k", 3},
                                     {"min_score", 0}}
                                    .dump()});
  ASSERT_EQ(http.status, 200);
  EXPECT_EQ(json::parse(http.body), cli_json);
  EXPECT_EQ(http.body + "\n", r.out);
}

TEST_F(CliPipeline, SearchTextAndErrors) {
  auto r = run_cli({"search", "--index", index_, "--table", "crm.orders_01", "--column",
                    "site_0"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("# effective config: "), std::string::npos);
  EXPECT_NE(r.out.find("0.9787  finance.shipments_05.site_1"), std::string::npos) << r.out;

  r = run_cli({"search", "--index", index_, "--table", "crm.orders_01", "--column", "nope"});
  EXPECT_EQ(r.code, kUserError);
  EXPECT_NE(r.err.find("nope"), std::string::npos);
  r = run_cli({"search", "--index", index_, "--table", "crm.orders_01", "--column", "site_0",
               "--k", "0"});
  EXPECT_EQ(r.code, kUserError);

  // An index whose sidecar is missing is reported by path.
  ScratchDir lone("lone");
  write_file(lone / "x.idx", read_file(index_));
  r = run_cli({"search", "--index", (lone / "x.idx").string(), "--table", "crm.orders_01",
               "--column", "site_0"});
  EXPECT_EQ(r.code, kUserError);
  EXPECT_NE(r.err.find("x.idx.manifest.json"), std::string::npos) << r.err;
}

TEST_F(CliPipeline, EvalWritesReportWithRecallAt10) {
  const std::string report = (*dir_ / "reports/eval.json").string();
  const auto r = run_cli({"eval", "--corpus", corpus_, "--truth", truth_, "--report", report,
                          "--repetitions", "1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(read_file(report));
  ASSERT_TRUE(j["full"]["metrics"]["summary"].contains("recall@10"));
  EXPECT_DOUBLE_EQ(j["full"]["metrics"]["summary"]["recall@10"].get<double>(), 1.0);
  ASSERT_EQ(j["sizes"].size(), 3u);
  for (const auto& row : j["sizes"]) {
    EXPECT_TRUE(row["metrics"]["summary"].contains("recall@10"));
  }
  EXPECT_EQ(echoed_config(r.out)["eval"]["ks"], json({1, 3, 5, 10}));

  const std::string csv = (*dir_ / "reports/eval.csv").string();
  ASSERT_EQ(run_cli({"eval", "--corpus", corpus_, "--truth", truth_, "--report", csv, "--ks",
                     "1,10", "--sample-sizes", "100", "--repetitions", "1"})
                .code,
            kOk);
  EXPECT_EQ(read_file(csv).rfind("k,precision,recall,size\n", 0), 0u) << read_file(csv);
}

}  // namespace
}  // namespace warpgate::cli
