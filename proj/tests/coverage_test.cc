// Copyright 2026 The StructFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "structfuzz/coverage.h"

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "structfuzz/common.h"

namespace structfuzz {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;

// Independent restatement of the bucket table.
int ReferenceBucket(uint32_t c) {
  static constexpr std::array<uint32_t, 8> kLowerBounds = {1, 2, 3, 4,
                                                           8, 16, 32, 128};
  int bucket = 0;
  for (int i = 0; i < 8; ++i) {
    if (c >= kLowerBounds[i]) bucket = i;
  }
  return bucket;
}

TEST(BucketizeTest, MatchesReferenceTableExhaustively) {
  for (uint32_t c = 1; c <= 300; ++c) {
    EXPECT_EQ(Bucketize(c), ReferenceBucket(c)) << "count " << c;
  }
  EXPECT_EQ(Bucketize(0xffffffffu), 7);
}

TEST(BucketizeTest, BoundaryValues) {
  EXPECT_EQ(Bucketize(3), 2);
  EXPECT_EQ(Bucketize(4), 3);
  EXPECT_EQ(Bucketize(7), 3);
  EXPECT_EQ(Bucketize(8), 4);
  EXPECT_EQ(Bucketize(127), 6);
  EXPECT_EQ(Bucketize(128), 7);
}

TEST(EdgeTraceTest, HitAccumulatesAndSaturates) {
  EdgeTrace t;
  t.Hit(5);
  t.Hit(5, 2);
  t.Hit(9, 0);
  EXPECT_EQ(t.count(5), 3u);
  EXPECT_EQ(t.count(9), 0u);
  EXPECT_EQ(t.size(), 1u);
  t.Hit(5, 0xfffffff0u);
  t.Hit(5, 0xfffffff0u);
  EXPECT_EQ(t.count(5), 0xffffffffu);
}

TEST(EdgeTraceTest, FromDenseSkipsZeros) {
  const std::vector<uint32_t> dense = {0, 3, 0, 0, 1};
  EdgeTrace t = EdgeTrace::FromDense(dense);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.count(1), 3u);
  EXPECT_EQ(t.count(4), 1u);
}

TEST(CoverageMapTest, ObserveReportsEdgesThenBuckets) {
  CoverageMap map;
  EdgeTrace a;
  a.Hit(1);
  a.Hit(2, 5);
  NoveltyVerdict v = map.Observe(a);
  EXPECT_EQ(v.new_edges, 2u);
  EXPECT_EQ(v.new_buckets, 0u);
  EXPECT_TRUE(v.is_interesting);

  // Same buckets again: nothing new.
  EdgeTrace same;
  same.Hit(1);
  same.Hit(2, 6);
  v = map.Observe(same);
  EXPECT_FALSE(v.is_interesting);

  EdgeTrace more;
  more.Hit(2, 200);
  v = map.Observe(more);
  EXPECT_EQ(v.new_edges, 0u);
  EXPECT_EQ(v.new_buckets, 1u);
  EXPECT_EQ(map.edges_seen(), 2u);
  EXPECT_EQ(map.mask(2), BucketBit(5) | BucketBit(200));
}

TEST(CoverageMapTest, EmptyTraceIsNotInteresting) {
  CoverageMap map;
  EXPECT_FALSE(map.Observe(EdgeTrace{}).is_interesting);
}

TEST(CoverageMapTest, PeekDoesNotModify) {
  CoverageMap map;
  EdgeTrace t;
  t.Hit(7);
  EXPECT_TRUE(map.Peek(t).is_interesting);
  EXPECT_EQ(map.edges_seen(), 0u);
  const NoveltyVerdict peeked = map.Peek(t);
  EXPECT_EQ(peeked, map.Observe(t));
  EXPECT_FALSE(map.Peek(t).is_interesting);
}

TEST(CoverageMapTest, NewEdgesListsOnlyUnseen) {
  CoverageMap map;
  EdgeTrace seen;
  seen.Hit(3);
  map.Observe(seen);
  EdgeTrace t;
  t.Hit(3, 50);
  t.Hit(4);
  t.Hit(1);
  EXPECT_THAT(map.NewEdges(t), ElementsAre(1, 4));
  EXPECT_THAT(map.NewEdges(seen), IsEmpty());
}

// Brute force: keep every observed trace and recompute novelty from scratch.
TEST(CoverageMapTest, IncrementalMatchesBruteForce) {
  Rng rng(11);
  CoverageMap map;
  std::vector<EdgeTrace> history;
  for (int i = 0; i < 300; ++i) {
    EdgeTrace t;
    const int n = static_cast<int>(rng.Below(12));
    for (int k = 0; k < n; ++k) {
      t.Hit(static_cast<EdgeId>(rng.Below(64)),
            static_cast<uint32_t>(1 + rng.Below(rng.OneIn(4) ? 300 : 4)));
    }
    NoveltyVerdict expected;
    for (const auto& [edge, count] : t.hits()) {
      bool edge_seen = false;
      bool bucket_seen = false;
      for (const EdgeTrace& h : history) {
        const uint32_t c = h.count(edge);
        if (c == 0) continue;
        edge_seen = true;
        if (Bucketize(c) == Bucketize(count)) bucket_seen = true;
      }
      if (!edge_seen) {
        ++expected.new_edges;
      } else if (!bucket_seen) {
        ++expected.new_buckets;
      }
    }
    expected.is_interesting = expected.new_edges + expected.new_buckets > 0;
    ASSERT_EQ(map.Observe(t), expected) << "trace " << i;
    history.push_back(t);
  }
}

}  // namespace
}  // namespace structfuzz
