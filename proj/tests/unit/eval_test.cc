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

#include "warpgate/eval.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "warpgate/json_io.h"
#include "warpgate/random.h"

namespace warpgate {
namespace {

using testing::read_file;
using testing::ScratchDir;
using testing::write_file;

ColumnRef r(const std::string& t, std::uint32_t i) { return {t, "c" + std::to_string(i), i}; }

std::shared_ptr<Catalog> two_table_catalog(const ScratchDir& dir) {
  write_file(dir / "d/a.csv", "x,y\n1,2\n");
  write_file(dir / "d/b.csv", "x,z\n1,3\n");
  auto cat = std::make_shared<Catalog>();
  cat->register_corpus(dir.path(), DatabaseNaming::kPerSubdirectory);
  return cat;
}

class GroundTruth : public ::testing::Test {
 protected:
  void SetUp() override { set_log_level(LogLevel::kOff); }
  void TearDown() override { set_log_level(LogLevel::kWarn); }
};

TEST_F(GroundTruth, EmptyFileIsEmptySet) {
  ScratchDir dir;
  const auto cat = two_table_catalog(dir);
  const auto truth = load_ground_truth(write_file(dir / "gt.csv", ""), *cat);
  EXPECT_TRUE(truth.entries.empty());
  EXPECT_EQ(truth.dropped_rows, 0u);
  const auto header_only = load_ground_truth(
      write_file(dir / "h.csv", "query_table,query_column,answer_table,answer_column\n"),
      *cat);
  EXPECT_TRUE(header_only.entries.empty());
}

TEST_F(GroundTruth, RowsGroupByQuery) {
  ScratchDir dir;
  const auto cat = two_table_catalog(dir);
  const auto truth = load_ground_truth(
      write_file(dir / "gt.csv",
                 "query_table,query_column,answer_table,answer_column\n"
                 "d.a,x,d.b,x\n"
                 "a,x,b,z\n"),
      *cat);
  ASSERT_EQ(truth.entries.size(), 1u);
  EXPECT_EQ(truth.entries[0].answers.size(), 2u);
  EXPECT_NE(truth.find(cat->column_ref(cat->resolve_table("a").table_id, "x")), nullptr);
  EXPECT_EQ(truth.find(cat->column_ref(cat->resolve_table("b").table_id, "x")), nullptr);
}

TEST_F(GroundTruth, UnresolvableRowsDropped) {
  ScratchDir dir;
  const auto cat = two_table_catalog(dir);
  const auto truth = load_ground_truth(
      write_file(dir / "gt.csv",
                 "query_table,query_column,answer_table,answer_column\n"
                 "d.a,x,d.b,x\n"
                 "d.a,x,d.missing,x\n"),
      *cat);
  EXPECT_EQ(truth.entries.size(), 1u);
  EXPECT_EQ(truth.dropped_rows, 1u);
  EXPECT_EQ(truth.warnings.size(), 1u);
}

TEST_F(GroundTruth, SelfAnswerDroppedAndArityChecked) {
  ScratchDir dir;
  const auto cat = two_table_catalog(dir);
  const auto truth = load_ground_truth(write_file(dir / "gt.csv", "d.a,x,d.a,x\n"), *cat);
  EXPECT_TRUE(truth.entries.empty());
  EXPECT_EQ(truth.dropped_rows, 1u);
  EXPECT_WARPGATE_ERROR(load_ground_truth(write_file(dir / "bad.csv", "d.a,x,d.b\n"), *cat),
                        ErrorCode::kMalformedRow);
  EXPECT_WARPGATE_ERROR(load_ground_truth(dir / "none.csv", *cat),
                        ErrorCode::kFileNotFound);
}

TEST(Metrics, PerfectTopOne) {
  const auto truth = make_ground_truth({{r("q", 0), {r("a", 0)}}});
  const std::size_t ks[] = {1};
  const auto m = precision_recall_at_k({{r("q", 0), {r("a", 0)}}}, truth, ks);
  EXPECT_DOUBLE_EQ(m.at(1)->precision, 1.0);
  EXPECT_DOUBLE_EQ(m.at(1)->recall, 1.0);
}

TEST(Metrics, NothingReturnedScoresZero) {
  const auto truth = make_ground_truth({{r("q", 0), {r("a", 0)}}});
  const std::size_t ks[] = {1, 5};
  for (const auto& results : {std::map<ColumnRef, std::vector<ColumnRef>>{},
                              std::map<ColumnRef, std::vector<ColumnRef>>{{r("q", 0), {}}}}) {
    const auto m = precision_recall_at_k(results, truth, ks);
    for (const auto& at : m.at_k) {
      EXPECT_EQ(at.precision, 0.0);
      EXPECT_EQ(at.recall, 0.0);
    }
  }
}

// Q1 answers {a, b}, returns [a, x, b]; Q2 answers {c}, returns [y].
//   k=1: Q1 P=1 R=1/2, Q2 P=0 R=0           -> P=1/2, R=1/4
//   k=3: Q1 P=2/3 R=1, Q2 P=0/1 R=0         -> P=1/3, R=1/2
//   k=5: Q1 considers min(5,3)=3, same as k=3
TEST(Metrics, HandEnumeratedTwoQueries) {
  const auto a = r("A", 0), b = r("B", 0), c = r("C", 0), x = r("X", 0), y = r("Y", 0);
  const auto q1 = r("Q", 1), q2 = r("Q", 2);
  const auto truth = make_ground_truth({{q1, {b, a}}, {q2, {c}}});
  const std::size_t ks[] = {1, 3, 5};
  const auto m = precision_recall_at_k({{q1, {a, x, b}}, {q2, {y}}}, truth, ks);
  EXPECT_DOUBLE_EQ(m.at(1)->precision, 0.5);
  EXPECT_DOUBLE_EQ(m.at(1)->recall, 0.25);
  EXPECT_DOUBLE_EQ(m.at(3)->precision, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.at(3)->recall, 0.5);
  EXPECT_DOUBLE_EQ(m.at(5)->precision, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.at(5)->recall, 0.5);
  EXPECT_EQ(m.per_query.size(), 2u);
  EXPECT_EQ(m.at(2), nullptr);
}

TEST(Metrics, EmptyAnswerSetsSkipped) {
  const auto truth = make_ground_truth({{r("q", 0), {}}, {r("q", 1), {r("a", 0)}}});
  const std::size_t ks[] = {1};
  const auto m = precision_recall_at_k({{r("q", 1), {r("a", 0)}}}, truth, ks);
  EXPECT_EQ(m.skipped_queries, 1u);
  EXPECT_DOUBLE_EQ(m.at(1)->recall, 1.0);
}

TEST(Metrics, RecallNonDecreasingAndBounded) {
  SplitMix64 rng(77);
  std::map<ColumnRef, std::vector<ColumnRef>> answers, results;
  for (std::uint32_t q = 0; q < 50; ++q) {
    for (int i = 0; i < 1 + static_cast<int>(rng.bounded(4)); ++i) {
      answers[r("q", q)].push_back(r("a", static_cast<std::uint32_t>(rng.bounded(12))));
    }
    for (int i = 0; i < static_cast<int>(rng.bounded(10)); ++i) {
      results[r("q", q)].push_back(r("a", static_cast<std::uint32_t>(rng.bounded(12))));
    }
  }
  const auto truth = make_ground_truth(answers);
  const std::size_t ks[] = {1, 2, 3, 5, 8, 10};
  const auto m = precision_recall_at_k(results, truth, ks);
  for (const auto& q : m.per_query) {
    for (std::size_t i = 0; i < q.at_k.size(); ++i) {
      EXPECT_GE(q.at_k[i].precision, 0.0);
      EXPECT_LE(q.at_k[i].precision, 1.0);
      EXPECT_LE(q.at_k[i].recall, 1.0);
      if (i > 0) EXPECT_GE(q.at_k[i].recall, q.at_k[i - 1].recall);
    }
  }
}

TEST(Metrics, JsonAndTextReports) {
  const auto truth = make_ground_truth({{r("q", 0), {r("a", 0)}}});
  const std::size_t ks[] = {1, 10};
  auto m = precision_recall_at_k({{r("q", 0), {r("a", 0)}}}, truth, ks);
  m.sample = SampleSpec{};
  const auto j = metrics_to_json(m);
  EXPECT_EQ(j.at("summary").at("recall@10"), 1.0);
  EXPECT_EQ(j.at("config").at("sample").at("size"), 1000);
  EXPECT_NE(metrics_to_text(m).find("precision"), std::string::npos);
}

class StandardTestbed : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ScratchDir();
    bed_ = new Testbed(generate_testbed(TestbedSpec{}, dir_->path()));
    auto cat = std::make_shared<Catalog>();
    cat->register_corpus(bed_->corpus_root, DatabaseNaming::kPerSubdirectory);
    cat_ = cat;
    truth_ = new GroundTruthSet(load_ground_truth(bed_->truth_path, *cat));
  }
  static void TearDownTestSuite() {
    delete truth_;
    delete bed_;
    delete dir_;
    cat_.reset();
  }

  static ScratchDir* dir_;
  static Testbed* bed_;
  static std::shared_ptr<const Catalog> cat_;
  static GroundTruthSet* truth_;
};
ScratchDir* StandardTestbed::dir_ = nullptr;
Testbed* StandardTestbed::bed_ = nullptr;
std::shared_ptr<const Catalog> StandardTestbed::cat_;
GroundTruthSet* StandardTestbed::truth_ = nullptr;

TEST_F(StandardTestbed, Shape) {
  EXPECT_EQ(cat_->table_count(), 10u);
  EXPECT_EQ(cat_->column_count(), 50u);
  EXPECT_EQ(bed_->pairs.size(), 20u);
  EXPECT_EQ(truth_->entries.size(), 40u);  // both directions
  EXPECT_EQ(truth_->dropped_rows, 0u);
  for (const auto& p : bed_->pairs) {
    EXPECT_GE(p.containment, 0.5 - 1e-9);
    EXPECT_LE(p.containment, 1.0);
  }
  for (const TableMeta* t : cat_->tables()) EXPECT_EQ(t->row_count, 1000u);
}

struct FrozenRow {
  const char* table;
  const char* column;
  std::vector<std::pair<std::string, double>> top3;
};

// First oracle run over the 50-column standard testbed (full default sample,
// k=3, min_score 0). Any change here means the embedder, sampler, testbed
// generator or tie-break changed.
TEST_F(StandardTestbed, FrozenOracleFixture) {
  const std::vector<FrozenRow> frozen = {
      {"crm.orders_01", "site_0",
       {{"finance.shipments_05.site_1", 0.9787}, {"sales.invoices_03.site_1", 0.5705},
        {"crm.partners_07.site_1", 0.5499}}},
      {"crm.partners_07", "label_2",
       {{"crm.orders_01.label_4", 0.9691}, {"sales.leads_09.site_0", 0.3505},
        {"finance.contracts_08.site_3", 0.3393}}},
      {"crm.products_04", "code_3",
       {{"sales.tickets_06.code_0", 0.9707}, {"finance.contracts_08.label_0", 0.2733},
        {"sales.tickets_06.label_2", 0.2725}}},
      {"finance.customers_02", "label_1",
       {{"sales.invoices_03.label_4", 0.9777}, {"crm.products_04.contact_2", 0.2048},
        {"finance.shipments_05.label_0", 0.1939}}},
      {"sales.invoices_03", "email_3",
       {{"finance.customers_02.email_2", 0.9714}, {"sales.tickets_06.contact_4", 0.2298},
        {"crm.partners_07.email_3", 0.2133}}},
      {"sales.tickets_06", "contact_4",
       {{"sales.invoices_03.contact_2", 0.9905}, {"sales.accounts_00.contact_4", 0.3123},
        {"crm.products_04.contact_2", 0.2438}}},
  };
  const BruteForceOracle oracle(cat_, std::make_shared<HashingEmbedder>(), SampleSpec{});
  SearchParams p;
  p.k = 3;
  p.min_score = 0.0;
  for (const auto& row : frozen) {
    const ColumnRef q = cat_->column_ref(cat_->resolve_table(row.table).table_id, row.column);
    const auto got = oracle.topk(q, p);
    ASSERT_EQ(got.size(), row.top3.size()) << row.table << "." << row.column;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].database + "." + got[i].table_name + "." + got[i].column.column_name,
                row.top3[i].first);
      EXPECT_DOUBLE_EQ(round_score(got[i].score), row.top3[i].second);
    }
  }
}

TEST_F(StandardTestbed, OracleRecallAtFiveSolvesTestbed) {
  const auto embedder = std::make_shared<HashingEmbedder>();
  const BruteForceOracle oracle(cat_, embedder, SampleSpec{});
  std::map<ColumnRef, std::vector<ColumnRef>> results;
  SearchParams p;
  p.k = 5;
  for (const auto& e : truth_->entries) {
    for (const auto& c : oracle.topk(e.query, p)) results[e.query].push_back(c.column);
  }
  const std::size_t ks[] = {5};
  EXPECT_GE(precision_recall_at_k(results, *truth_, ks).at(5)->recall, 0.8);
}

TEST_F(StandardTestbed, OracleDuplicateRanksFirst) {
  ScratchDir dir;
  write_file(dir / "d/a.csv", "v\nred\ngreen\nblue\n");
  write_file(dir / "d/b.csv", "w\nblue\nred\ngreen\nred\n");
  write_file(dir / "d/c.csv", "u\nredish\n");
  auto cat = std::make_shared<Catalog>();
  cat->register_corpus(dir.path(), DatabaseNaming::kFlat);
  const auto got = brute_force_topk(cat->column_ref(cat->resolve_table("a").table_id, "v"),
                                    cat, std::make_shared<HashingEmbedder>(), SampleSpec{},
                                    SearchParams{});
  ASSERT_FALSE(got.empty());
  EXPECT_EQ(got[0].table_name, "b");
  EXPECT_NEAR(got[0].score, 1.0, 1e-9);
}

TEST_F(StandardTestbed, FullOnlyAblationEqualsDirectEvaluation) {
  const auto embedder = std::make_shared<HashingEmbedder>();
  AblationConfig cfg;
  cfg.sizes = {std::nullopt};
  cfg.timing_repetitions = 1;
  const auto result = sampling_ablation(cat_, embedder, *truth_, cfg);
  ASSERT_EQ(result.rows.size(), 1u);
  SampleSpec full{SampleStrategy::kFull, 0, cfg.sample_seed};
  const auto engine = DiscoveryEngine::build(cat_, full, embedder, cfg.lsh);
  const auto direct = evaluate(engine, *truth_, cfg.ks, cfg.params, 1);
  for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
    EXPECT_DOUBLE_EQ(result.rows[0].report.at_k[i].precision, direct.at_k[i].precision);
    EXPECT_DOUBLE_EQ(result.rows[0].report.at_k[i].recall, direct.at_k[i].recall);
    EXPECT_EQ(result.rows[0].delta_vs_full[i].recall, 0.0);
  }
}

TEST_F(StandardTestbed, AblationReportsTimingAndFormats) {
  AblationConfig cfg;
  cfg.sizes = {10, 100};
  cfg.timing_repetitions = 2;
  const auto result =
      sampling_ablation(cat_, std::make_shared<HashingEmbedder>(), *truth_, cfg);
  ASSERT_EQ(result.rows.size(), 2u);
  for (const auto& row : result.rows) {
    ASSERT_TRUE(row.report.timing.has_value());
    EXPECT_GE(row.report.timing->mean_lookup_seconds, 0.0);
    EXPECT_GE(row.report.timing->mean_end_to_end_seconds, 0.0);
    EXPECT_TRUE(row.report.timing->lookup_within_end_to_end);
    EXPECT_GE(row.build_seconds, 0.0);
    EXPECT_EQ(row.report.sample->size, *row.sample_size);
  }
  const std::string csv = ablation_to_csv(result);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,precision,recall,size");
  EXPECT_NE(csv.find(",full\n"), std::string::npos);
  EXPECT_NE(csv.find(",10\n"), std::string::npos);
  const auto j = ablation_to_json(result);
  EXPECT_EQ(j.at("sizes").size(), 2u);
  EXPECT_NE(ablation_to_text(result).find("lookup_ms"), std::string::npos);
}

TEST(Testbed, ZeroPairsGivesEmptyTruth) {
  ScratchDir dir;
  TestbedSpec spec;
  spec.planted_pairs = 0;
  spec.num_tables = 3;
  spec.rows_per_table = 20;
  const auto bed = generate_testbed(spec, dir.path());
  EXPECT_TRUE(bed.pairs.empty());
  auto cat = std::make_shared<Catalog>();
  cat->register_corpus(bed.corpus_root, DatabaseNaming::kPerSubdirectory);
  EXPECT_TRUE(load_ground_truth(bed.truth_path, *cat).entries.empty());
}

TEST(Testbed, SameSpecTwiceIsByteIdentical) {
  ScratchDir a("a"), b("b");
  TestbedSpec spec;
  spec.rows_per_table = 200;
  generate_testbed(spec, a.path());
  generate_testbed(spec, b.path());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(a.path())) {
    if (e.is_regular_file()) files.push_back(std::filesystem::relative(e.path(), a.path()));
  }
  ASSERT_GT(files.size(), 10u);
  for (const auto& f : files) {
    EXPECT_EQ(read_file(a.path() / f), read_file(b.path() / f)) << f;
  }
  spec.seed = 8;
  ScratchDir c("c");
  generate_testbed(spec, c.path());
  EXPECT_NE(read_file(a / "ground_truth.csv"), read_file(c / "ground_truth.csv"));
}

TEST(Testbed, InvalidSpecs) {
  ScratchDir dir;
  TestbedSpec spec;
  spec.num_tables = 2;
  spec.columns_per_table = 2;
  spec.planted_pairs = 5;  // only 4 cross-table pairs exist
  EXPECT_WARPGATE_ERROR(generate_testbed(spec, dir.path()), ErrorCode::kInvalidSpec);
  spec = {};
  spec.noise.min_containment = 0.3;
  EXPECT_WARPGATE_ERROR(generate_testbed(spec, dir.path()), ErrorCode::kInvalidSpec);
  spec = {};
  spec.rows_per_table = 0;
  EXPECT_WARPGATE_ERROR(generate_testbed(spec, dir.path()), ErrorCode::kInvalidSpec);
}

TEST(Timing, LookupWithinEndToEnd) {
  ScratchDir dir;
  TestbedSpec spec;
  spec.rows_per_table = 100;
  spec.num_tables = 4;
  spec.planted_pairs = 3;
  const auto bed = generate_testbed(spec, dir.path());
  auto cat = std::make_shared<Catalog>();
  cat->register_corpus(bed.corpus_root, DatabaseNaming::kPerSubdirectory);
  const auto engine = DiscoveryEngine::build(cat, SampleSpec{},
                                             std::make_shared<HashingEmbedder>(), LshConfig{});
  const auto queries = cat->all_columns();
  const auto t = measure_timing(engine, queries, SearchParams{}, 3);
  EXPECT_EQ(t.queries, queries.size());
  EXPECT_EQ(t.repetitions, 3u);
  EXPECT_TRUE(t.lookup_within_end_to_end);
  EXPECT_LE(t.mean_lookup_seconds, t.mean_end_to_end_seconds);
  EXPECT_GE(t.cv_end_to_end, 0.0);
}

}  // namespace
}  // namespace warpgate
