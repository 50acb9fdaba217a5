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

#include "structfuzz/stub_mutator.h"

#include <algorithm>
#include <optional>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "structfuzz/channel.h"
#include "structfuzz/common.h"
#include "structfuzz/hexcodec.h"
#include "structfuzz/targets/chunkfmt.h"
#include "test_util.h"

namespace structfuzz {
namespace {

using ::testing::HasSubstr;

size_t ChangedChunks(const chunkfmt::File& a, const chunkfmt::File& b) {
  size_t n = 0;
  for (size_t i = 0; i < a.chunks.size(); ++i) {
    if (a.chunks[i].payload != b.chunks[i].payload ||
        a.chunks[i].checksum != b.chunks[i].checksum) {
      ++n;
    }
  }
  return n;
}

TEST(StubMutateTest, HeaderSeedChangesOneFieldAndChecksum) {
  const Bytes seed = chunkfmt::BuildSeed(2, 2, std::nullopt, {});
  const Bytes out = StubMutate(seed, "CHUNKFMT");
  std::optional<chunkfmt::File> before = chunkfmt::ParseFraming(seed);
  std::optional<chunkfmt::File> after = chunkfmt::ParseFraming(out);
  ASSERT_TRUE(after.has_value());
  EXPECT_TRUE(chunkfmt::ChecksumsValid(*after));
  EXPECT_NE(out, seed);
  ASSERT_EQ(after->chunks.size(), before->chunks.size());
  EXPECT_EQ(ChangedChunks(*before, *after), 1u);
  const Bytes& hdr = after->chunks[0].payload;
  const uint32_t w = (hdr[0] << 24) | (hdr[1] << 16) | (hdr[2] << 8) | hdr[3];
  const uint32_t h = (hdr[4] << 24) | (hdr[5] << 16) | (hdr[6] << 8) | hdr[7];
  EXPECT_TRUE(w == 2 || h == 2);
  const uint32_t changed = w != 2 ? w : h;
  EXPECT_TRUE(std::find(kStubBoundaryValues.begin(), kStubBoundaryValues.end(),
                        changed) != kStubBoundaryValues.end());
}

TEST(StubMutateTest, RandomValidSeedsStayValid) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Bytes> data;
    const int chunks = static_cast<int>(rng.Below(3));
    for (int k = 0; k < chunks; ++k) {
      data.push_back(testing::RandomBytes(rng, 1 + rng.Below(16)));
    }
    std::optional<uint32_t> gamma;
    if (rng.OneIn(2)) gamma = static_cast<uint32_t>(rng.Next());
    const Bytes seed = chunkfmt::BuildSeed(static_cast<uint32_t>(rng.Next()),
                                           static_cast<uint32_t>(rng.Next()),
                                           gamma, data);
    const Bytes out = StubMutate(seed, "CHUNKFMT");
    std::optional<chunkfmt::File> f = chunkfmt::ParseFraming(out);
    ASSERT_TRUE(f.has_value()) << i;
    ASSERT_TRUE(chunkfmt::ChecksumsValid(*f)) << i;
    ASSERT_NE(out, seed) << i;
    ASSERT_EQ(out.size(), seed.size()) << i;
  }
}

TEST(StubMutateTest, Deterministic) {
  const Bytes seed = chunkfmt::BuildSeed(9, 9, 3, {ToBytes("abc")});
  EXPECT_EQ(StubMutate(seed, "CHUNKFMT"), StubMutate(seed, "CHUNKFMT"));
}

TEST(StubMutateTest, FallbackFlipsOneByte) {
  const Bytes in = ToBytes("not a chunk file");
  for (const char* tag : {"CHUNKFMT", "BIN"}) {
    const Bytes out = StubMutate(in, tag);
    ASSERT_EQ(out.size(), in.size());
    int diffs = 0;
    for (size_t i = 0; i < in.size(); ++i) diffs += in[i] != out[i];
    EXPECT_EQ(diffs, 1) << tag;
  }
  EXPECT_EQ(StubMutate(Bytes{}, "BIN"), Bytes{0xff});
}

TEST(HandleRequestLineTest, ValidRequest) {
  const Bytes seed = chunkfmt::BuildSeed(2, 2, std::nullopt, {});
  const std::string line =
      HandleRequestLine("REQ 17 CHUNKFMT " + EncodeHex(seed));
  absl::StatusOr<MutationResponse> res = ParseResponse(line);
  ASSERT_TRUE(res.ok()) << line;
  EXPECT_EQ(res->seed_id, 17u);
  ASSERT_FALSE(res->is_void());
  const Bytes out = *Decode(*res->hex);
  EXPECT_EQ(std::string(out.begin(), out.begin() + 4), "FZ01");
  EXPECT_TRUE(chunkfmt::ChecksumsValid(*chunkfmt::ParseFraming(out)));
}

TEST(HandleRequestLineTest, MalformedRequests) {
  EXPECT_EQ(HandleRequestLine("REQ 4 CHUNKFMT zz"), "RES 4 VOID");
  EXPECT_EQ(HandleRequestLine("REQ 4 lower 00"), "RES 4 VOID");
  EXPECT_EQ(HandleRequestLine("REQ x CHUNKFMT 00"), "");
  EXPECT_EQ(HandleRequestLine("hello"), "");
}

}  // namespace
}  // namespace structfuzz
