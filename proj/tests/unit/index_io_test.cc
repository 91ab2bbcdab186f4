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

#include <cstring>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "warpgate/random.h"
#include "warpgate/simhash.h"

namespace warpgate {
namespace {

using testing::read_file;
using testing::ScratchDir;
using testing::write_file;

LshIndex make_index(std::size_t dim, int n, std::uint64_t seed = 1) {
  LshConfig c;
  c.dimension = dim;
  c.num_tables = 6;
  c.bits_per_table = 5;
  LshIndex index(c);
  GaussianSource g(seed);
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(dim);
    for (double& v : x) v = g.next();
    index.insert({"t" + std::to_string(i % 7), "col" + std::to_string(i),
                  static_cast<std::uint32_t>(i)},
                 EmbeddingVector(std::move(x)).normalized());
  }
  return index;
}

IndexFileInfo info_for(std::size_t dim) {
  EmbedderConfig e;
  e.dimension = dim;
  return {kIndexFormatVersion, HashingEmbedder(e).describe(), SampleSpec{}};
}

TEST(IndexFile, RoundTripPreservesCandidates) {
  ScratchDir dir;
  const LshIndex index = make_index(128, 60);
  save_index(index, info_for(128), dir / "a.idx");
  const LoadedIndex loaded = load_index(dir / "a.idx");
  EXPECT_EQ(loaded.index.config(), index.config());
  EXPECT_EQ(loaded.info.embedder, info_for(128).embedder);
  EXPECT_EQ(loaded.info.sample, SampleSpec{});
  ASSERT_EQ(loaded.index.size(), index.size());
  for (const auto& e : index.entries()) {
    const auto* got = loaded.index.find(e.ref);
    ASSERT_NE(got, nullptr);
    EXPECT_EQ(got->ref.column_name, e.ref.column_name);
    EXPECT_EQ(got->vector, e.vector);
    EXPECT_EQ(loaded.index.query_candidates(e.vector), index.query_candidates(e.vector));
  }
}

TEST(IndexFile, SavingTwiceIsByteIdentical) {
  ScratchDir dir;
  save_index(make_index(64, 30), info_for(64), dir / "a.idx");
  save_index(make_index(64, 30), info_for(64), dir / "b.idx");
  EXPECT_EQ(read_file(dir / "a.idx"), read_file(dir / "b.idx"));
}

TEST(IndexFile, AlteredChecksumIsCorrupt) {
  ScratchDir dir;
  save_index(make_index(32, 10), info_for(32), dir / "a.idx");
  std::string bytes = read_file(dir / "a.idx");
  bytes[12] ^= 0x01;  // first checksum byte
  write_file(dir / "b.idx", bytes);
  EXPECT_WARPGATE_ERROR(load_index(dir / "b.idx"), ErrorCode::kCorruptFile);
}

TEST(IndexFile, AlteredPayloadIsCorrupt) {
  ScratchDir dir;
  save_index(make_index(32, 10), info_for(32), dir / "a.idx");
  std::string bytes = read_file(dir / "a.idx");
  bytes[bytes.size() - 3] ^= 0x40;
  write_file(dir / "b.idx", bytes);
  EXPECT_WARPGATE_ERROR(load_index(dir / "b.idx"), ErrorCode::kCorruptFile);
}

TEST(IndexFile, TruncatedAndForeignFiles) {
  ScratchDir dir;
  save_index(make_index(32, 10), info_for(32), dir / "a.idx");
  const std::string bytes = read_file(dir / "a.idx");
  write_file(dir / "short.idx", bytes.substr(0, bytes.size() / 2));
  EXPECT_WARPGATE_ERROR(load_index(dir / "short.idx"), ErrorCode::kCorruptFile);
  write_file(dir / "tiny.idx", "WGL");
  EXPECT_WARPGATE_ERROR(load_index(dir / "tiny.idx"), ErrorCode::kCorruptFile);
  write_file(dir / "csv.idx", "a,b\n1,2\n3,4\n5,6\n7,8\n");
  EXPECT_WARPGATE_ERROR(load_index(dir / "csv.idx"), ErrorCode::kCorruptFile);
  EXPECT_WARPGATE_ERROR(load_index(dir / "missing.idx"), ErrorCode::kFileNotFound);
}

TEST(IndexFile, FutureVersionIsRejected) {
  ScratchDir dir;
  save_index(make_index(32, 10), info_for(32), dir / "a.idx");
  std::string bytes = read_file(dir / "a.idx");
  const std::uint32_t version = kIndexFormatVersion + 1;
  std::memcpy(bytes.data() + 8, &version, sizeof version);
  write_file(dir / "b.idx", bytes);
  EXPECT_WARPGATE_ERROR(load_index(dir / "b.idx"), ErrorCode::kVersionMismatch);
}

TEST(IndexFile, Dimension64IndexIntoDimension128EngineIsMismatch) {
  ScratchDir dir;
  save_index(make_index(64, 10), info_for(64), dir / "a.idx");
  EXPECT_NO_THROW(load_index(dir / "a.idx", HashingEmbedder(EmbedderConfig{.dimension = 64})));
  EXPECT_WARPGATE_ERROR(load_index(dir / "a.idx", HashingEmbedder()),
                        ErrorCode::kConfigMismatch);
}

TEST(IndexFile, DifferentEmbedderSeedIsMismatch) {
  ScratchDir dir;
  save_index(make_index(128, 5), info_for(128), dir / "a.idx");
  EmbedderConfig other;
  other.hash_seed = 43;
  EXPECT_WARPGATE_ERROR(load_index(dir / "a.idx", HashingEmbedder(other)),
                        ErrorCode::kConfigMismatch);
}

}  // namespace
}  // namespace warpgate
