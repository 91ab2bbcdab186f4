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

// Synthetic corpus generator. Every column draws its cells from a "domain":
// a vocabulary of strings built from a domain-private syllable and digit
// inventory in one of a few surface styles. Planted pairs share a domain
// and overlap in their value subsets; everything else gets its own domain.

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "csv.h"
#include "warpgate/error.h"
#include "warpgate/eval.h"
#include "warpgate/random.h"

namespace warpgate {
namespace fs = std::filesystem;

namespace {

enum class Style { kWord, kName, kCode, kEmail, kWordNumber };
constexpr std::size_t kStyleCount = 5;

constexpr std::array<std::string_view, 8> kDatabaseNames = {
    "sales", "crm", "finance", "ops", "marketing", "support", "hr", "logistics"};
constexpr std::array<std::string_view, 12> kTableNouns = {
    "accounts", "orders",   "customers", "invoices", "products", "shipments",
    "tickets",  "partners", "contracts", "leads",    "vendors",  "payments"};
constexpr std::array<std::string_view, 8> kAffixes = {
    "#", "id:", " ltd", " (v2)", "_x", "ref-", " co", "~"};
constexpr std::string_view kConsonants = "bcdfghjklmnprstvwz";
constexpr std::string_view kVowels = "aeiou";

std::string_view style_column_name(Style s) {
  switch (s) {
    case Style::kWord: return "label";
    case Style::kName: return "contact";
    case Style::kCode: return "code";
    case Style::kEmail: return "email";
    case Style::kWordNumber: return "site";
  }
  return "value";
}

struct Domain {
  Style style = Style::kWord;
  std::vector<std::string> vocab;
};

class DomainBuilder {
 public:
  explicit DomainBuilder(SplitMix64& rng) : rng_(rng) {}

  Domain build() {
    Domain d;
    d.style = static_cast<Style>(rng_.bounded(kStyleCount));
    syllables_.clear();
    const std::size_t n_syl = 3 + rng_.bounded(2);
    while (syllables_.size() < n_syl) {
      std::string s;
      s.push_back(kConsonants[rng_.bounded(kConsonants.size())]);
      s.push_back(kVowels[rng_.bounded(kVowels.size())]);
      if (rng_.bounded(2) == 0) s.push_back(kConsonants[rng_.bounded(kConsonants.size())]);
      if (std::find(syllables_.begin(), syllables_.end(), s) == syllables_.end()) {
        syllables_.push_back(std::move(s));
      }
    }
    digits_.clear();
    std::string all = "0123456789";
    for (std::size_t i = 0; i < 4; ++i) {
      const std::size_t j = i + rng_.bounded(all.size() - i);
      std::swap(all[i], all[j]);
      digits_.push_back(all[i]);
    }
    host_ = word(2);

    const std::size_t target = 150 + rng_.bounded(251);
    std::unordered_set<std::string> seen;
    for (std::size_t attempts = 0; d.vocab.size() < target && attempts < target * 20;
         ++attempts) {
      std::string v = value(d.style);
      if (seen.insert(v).second) d.vocab.push_back(std::move(v));
    }
    return d;
  }

 private:
  std::string word(std::size_t syllables) {
    std::string w;
    for (std::size_t i = 0; i < syllables; ++i) {
      w += syllables_[rng_.bounded(syllables_.size())];
    }
    return w;
  }
  std::string number(std::size_t len) {
    std::string n;
    for (std::size_t i = 0; i < len; ++i) n.push_back(digits_[rng_.bounded(digits_.size())]);
    return n;
  }
  static std::string capitalized(std::string w) {
    if (!w.empty()) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
  }
  static std::string upper(std::string w) {
    for (char& c : w) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    return w;
  }

  std::string value(Style style) {
    switch (style) {
      case Style::kWord:
        return capitalized(word(3 + rng_.bounded(2)));
      case Style::kName:
        return capitalized(word(2)) + " " + capitalized(word(2 + rng_.bounded(2)));
      case Style::kCode:
        return upper(host_) + "-" + upper(word(2)) + "-" + number(4);
      case Style::kEmail:
        return word(2) + "." + word(1 + rng_.bounded(2)) + "@" + host_ + ".com";
      case Style::kWordNumber:
        return capitalized(word(2 + rng_.bounded(2))) + " " + capitalized(host_) + " " +
               number(1 + rng_.bounded(3));
    }
    return {};
  }

  SplitMix64& rng_;
  std::vector<std::string> syllables_;
  std::string digits_;
  std::string host_;
};

std::vector<std::uint32_t> random_subset(SplitMix64& rng, std::vector<std::uint32_t> pool,
                                         std::size_t size) {
  size = std::min(size, pool.size());
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + rng.bounded(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::string apply_noise(std::string v, const NoiseProfile& noise, std::string_view affix,
                        bool affix_is_prefix, SplitMix64& rng) {
  if (rng.uniform() < noise.case_rate) {
    switch (rng.bounded(3)) {
      case 0:
        for (char& c : v) {
          if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        }
        break;
      case 1:
        for (char& c : v) {
          if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        break;
      default: {
        bool start = true;
        for (char& c : v) {
          if (c >= 'a' && c <= 'z' && start) c = static_cast<char>(c - 'a' + 'A');
          start = (c == ' ' || c == '-' || c == '.');
        }
      }
    }
  }
  if (rng.uniform() < noise.punctuation_rate) {
    static constexpr std::array<char, 3> kSeparators = {'_', '/', ' '};
    const char sep = kSeparators[rng.bounded(kSeparators.size())];
    for (char& c : v) {
      if (c == ' ' || c == '-' || c == '.') c = sep;
    }
  }
  if (rng.uniform() < noise.affix_rate) {
    v = affix_is_prefix ? std::string(affix) + v : v + std::string(affix);
  }
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

}  // namespace

void NoiseProfile::validate() const {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!(min_containment >= 0.5 && max_containment <= 1.0 &&
        min_containment <= max_containment)) {
    fail(ErrorCode::kInvalidSpec,
         "containment range must satisfy 0.5 <= min <= max <= 1.0");
  }
  if (!unit(case_rate) || !unit(punctuation_rate) || !unit(affix_rate) ||
      !unit(null_rate)) {
    fail(ErrorCode::kInvalidSpec, "noise rates must lie in [0, 1]");
  }
}

void TestbedSpec::validate() const {
  if (num_tables == 0 || columns_per_table == 0 || rows_per_table == 0) {
    fail(ErrorCode::kInvalidSpec, "tables, columns and rows must all be >= 1");
  }
  if (num_databases == 0) fail(ErrorCode::kInvalidSpec, "num_databases must be >= 1");
  const std::size_t n = num_tables * columns_per_table;
  const std::size_t cross_pairs =
      n * (n - 1) / 2 - num_tables * columns_per_table * (columns_per_table - 1) / 2;
  if (planted_pairs > cross_pairs) {
    fail(ErrorCode::kInvalidSpec,
         "planted_pairs " + std::to_string(planted_pairs) + " exceeds the " +
             std::to_string(cross_pairs) + " cross-table column pairs");
  }
  noise.validate();
}

Testbed generate_testbed(const TestbedSpec& spec, const fs::path& out_dir) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const std::size_t n_cols = spec.num_tables * spec.columns_per_table;
  auto table_of = [&](std::size_t col) { return col / spec.columns_per_table; };

  // Planted pairs: shuffled cross-table pairs, disjoint ones first.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> all_pairs;
  for (std::uint32_t a = 0; a < n_cols; ++a) {
    for (std::uint32_t b = a + 1; b < n_cols; ++b) {
      if (table_of(a) != table_of(b)) all_pairs.emplace_back(a, b);
    }
  }
  for (std::size_t i = all_pairs.size(); i > 1; --i) {
    std::swap(all_pairs[i - 1], all_pairs[rng.bounded(i)]);
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> planted;
  std::vector<bool> chosen(all_pairs.size(), false);
  std::vector<bool> used(n_cols, false);
  for (std::size_t i = 0; i < all_pairs.size() && planted.size() < spec.planted_pairs; ++i) {
    auto [a, b] = all_pairs[i];
    if (used[a] || used[b]) continue;
    used[a] = used[b] = true;
    chosen[i] = true;
    planted.push_back(all_pairs[i]);
  }
  for (std::size_t i = 0; i < all_pairs.size() && planted.size() < spec.planted_pairs; ++i) {
    if (!chosen[i]) planted.push_back(all_pairs[i]);
  }

  std::vector<std::vector<std::uint32_t>> adjacency(n_cols);
  for (auto [a, b] : planted) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }

  // One domain per connected component; value subsets assigned breadth-first
  // so each planted partner overlaps its parent with the drawn containment.
  DomainBuilder domains_builder(rng);
  std::vector<Domain> domains;
  std::vector<std::size_t> domain_of(n_cols, 0);
  std::vector<std::vector<std::uint32_t>> subset(n_cols);
  std::vector<bool> noisy(n_cols, false);
  std::vector<bool> assigned(n_cols, false);
  const double lo = spec.noise.min_containment;
  const double hi = spec.noise.max_containment;
  for (std::uint32_t root = 0; root < n_cols; ++root) {
    if (assigned[root]) continue;
    domains.push_back(domains_builder.build());
    const std::size_t d = domains.size() - 1;
    std::vector<std::uint32_t> pool(domains[d].vocab.size());
    for (std::uint32_t i = 0; i < pool.size(); ++i) pool[i] = i;

    auto subset_size = [&] {
      return static_cast<std::size_t>(
          std::lround(static_cast<double>(pool.size()) * (0.5 + 0.4 * rng.uniform())));
    };
    domain_of[root] = d;
    subset[root] = random_subset(rng, pool, subset_size());
    assigned[root] = true;
    std::deque<std::uint32_t> queue{root};
    while (!queue.empty()) {
      const std::uint32_t parent = queue.front();
      queue.pop_front();
      for (std::uint32_t child : adjacency[parent]) {
        if (assigned[child]) continue;
        const double containment = lo + (hi - lo) * rng.uniform();
        const std::size_t size = std::max<std::size_t>(1, subset_size());
        const std::size_t shared = std::min(
            subset[parent].size(),
            static_cast<std::size_t>(std::lround(containment * static_cast<double>(size))));
        std::vector<std::uint32_t> outside;
        std::set_difference(pool.begin(), pool.end(), subset[parent].begin(),
                            subset[parent].end(), std::back_inserter(outside));
        std::vector<std::uint32_t> s = random_subset(rng, subset[parent], shared);
        std::vector<std::uint32_t> rest = random_subset(rng, outside, size - shared);
        s.insert(s.end(), rest.begin(), rest.end());
        std::sort(s.begin(), s.end());
        subset[child] = std::move(s);
        domain_of[child] = d;
        noisy[child] = true;
        assigned[child] = true;
        queue.push_back(child);
      }
    }
  }

  // Names.
  std::vector<std::string> db_names(spec.num_databases);
  for (std::size_t i = 0; i < spec.num_databases; ++i) {
    db_names[i] = i < kDatabaseNames.size() ? std::string(kDatabaseNames[i])
                                            : "db_" + std::to_string(i);
  }
  std::vector<std::string> table_names(spec.num_tables);
  std::vector<std::string> table_db(spec.num_tables);
  for (std::size_t t = 0; t < spec.num_tables; ++t) {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_%02zu", t);
    table_names[t] = std::string(kTableNouns[t % kTableNouns.size()]) + suffix;
    table_db[t] = db_names[t % spec.num_databases];
  }
  std::vector<std::string> column_names(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    column_names[c] = std::string(style_column_name(domains[domain_of[c]].style)) +
                      "_" + std::to_string(c % spec.columns_per_table);
  }

  // Cells.
  Testbed bed;
  bed.corpus_root = out_dir / "corpus";
  bed.truth_path = out_dir / "ground_truth.csv";
  std::error_code ec;
  fs::remove_all(bed.corpus_root, ec);
  fs::create_directories(bed.corpus_root);
  for (const auto& db : db_names) fs::create_directories(bed.corpus_root / db);

  for (std::size_t t = 0; t < spec.num_tables; ++t) {
    const std::size_t first = t * spec.columns_per_table;
    std::vector<std::string> affix(spec.columns_per_table);
    std::vector<bool> prefix(spec.columns_per_table);
    for (std::size_t c = 0; c < spec.columns_per_table; ++c) {
      affix[c] = kAffixes[rng.bounded(kAffixes.size())];
      prefix[c] = rng.bounded(2) == 0;
    }
    std::string text;
    std::vector<std::string> header(column_names.begin() + static_cast<std::ptrdiff_t>(first),
                                    column_names.begin() +
                                        static_cast<std::ptrdiff_t>(first + spec.columns_per_table));
    text += csv::format_row(header);
    std::vector<std::string> row(spec.columns_per_table);
    for (std::size_t r = 0; r < spec.rows_per_table; ++r) {
      for (std::size_t c = 0; c < spec.columns_per_table; ++c) {
        const std::size_t col = first + c;
        const auto& vocab = domains[domain_of[col]].vocab;
        const auto& s = subset[col];
        std::string v = vocab[s[rng.bounded(s.size())]];
        if (noisy[col]) v = apply_noise(std::move(v), spec.noise, affix[c], prefix[c], rng);
        if (rng.uniform() < spec.noise.null_rate) v.clear();
        row[c] = std::move(v);
      }
      text += csv::format_row(row);
    }
    write_text(bed.corpus_root / table_db[t] / (table_names[t] + ".csv"), text);
  }

  // Ground truth, both directions, sorted.
  auto qualified = [&](std::size_t col) {
    const std::size_t t = table_of(col);
    return table_db[t] + "." + table_names[t];
  };
  std::set<std::vector<std::string>> truth_rows;
  for (auto [a, b] : planted) {
    std::vector<std::uint32_t> common;
    std::set_intersection(subset[a].begin(), subset[a].end(), subset[b].begin(),
                          subset[b].end(), std::back_inserter(common));
    const auto& child = noisy[b] ? subset[b] : subset[a];
    bed.pairs.push_back({qualified(a), column_names[a], qualified(b), column_names[b],
                         static_cast<double>(common.size()) / child.size()});
    truth_rows.insert({qualified(a), column_names[a], qualified(b), column_names[b]});
    truth_rows.insert({qualified(b), column_names[b], qualified(a), column_names[a]});
  }
  std::string truth = "query_table,query_column,answer_table,answer_column\n";
  for (const auto& r : truth_rows) truth += csv::format_row(r);
  write_text(bed.truth_path, truth);

  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : bed.pairs) {
    pairs.push_back({{"table_a", p.table_a},
                     {"column_a", p.column_a},
                     {"table_b", p.table_b},
                     {"column_b", p.column_b},
                     {"containment", p.containment}});
  }
  const nlohmann::json info = {
      {"num_tables", spec.num_tables},
      {"columns_per_table", spec.columns_per_table},
      {"rows_per_table", spec.rows_per_table},
      {"planted_pairs", spec.planted_pairs},
      {"num_databases", spec.num_databases},
      {"seed", spec.seed},
      {"noise",
       {{"min_containment", spec.noise.min_containment},
        {"max_containment", spec.noise.max_containment},
        {"case_rate", spec.noise.case_rate},
        {"punctuation_rate", spec.noise.punctuation_rate},
        {"affix_rate", spec.noise.affix_rate},
        {"null_rate", spec.noise.null_rate}}},
      {"pairs", pairs}};
  write_text(out_dir / "testbed.json", info.dump(2) + "\n");
  return bed;
}

}  // namespace warpgate
