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

#include "structfuzz/executor.h"

#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "structfuzz/common.h"
#include "structfuzz/coverage.h"
#include "structfuzz/targets/chunkfmt.h"
#include "test_util.h"

namespace structfuzz {
namespace {

using ::testing::HasSubstr;

std::unique_ptr<CoverageProvider> MustMake(const std::string& spec,
                                           const std::filesystem::path& dir) {
  absl::StatusOr<std::unique_ptr<CoverageProvider>> p = MakeProvider(spec, dir);
  EXPECT_TRUE(p.ok()) << p.status();
  return p.ok() ? *std::move(p) : nullptr;
}

TEST(CoverageDumpTest, RoundTrip) {
  EdgeTrace t;
  t.Hit(3, 2);
  t.Hit(150);
  EXPECT_EQ(FormatCoverageDump(t), "3 2\n150 1\n");
  EXPECT_EQ(*ParseCoverageDump(FormatCoverageDump(t)), t);
  EXPECT_TRUE(ParseCoverageDump("")->empty());
}

TEST(CoverageDumpTest, RejectsBadDumps) {
  EXPECT_FALSE(ParseCoverageDump("5 1\n3 1\n").ok());
  EXPECT_FALSE(ParseCoverageDump("5 1\n5 1\n").ok());
  EXPECT_FALSE(ParseCoverageDump("5\n").ok());
  EXPECT_FALSE(ParseCoverageDump("a b\n").ok());
}

TEST(InProcessProviderTest, DeterministicTraceAndCrash) {
  testing::ScopedTempDir dir;
  auto p = MustMake("chunkfmt", dir.path());
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->kind(), ProviderKind::kInProcess);
  const Bytes seed = chunkfmt::BuildSeed(2, 2, 1, {ToBytes("ab")});
  absl::StatusOr<ExecOutcome> a = p->Execute(seed, 1000);
  absl::StatusOr<ExecOutcome> b = p->Execute(seed, 1000);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->status, ExecStatus::kOk);
  EXPECT_EQ(a->trace, b->trace);

  absl::StatusOr<ExecOutcome> crash =
      p->Execute(chunkfmt::BuildSeed(512, 512, std::nullopt, {ToBytes("d")}), 1000);
  ASSERT_TRUE(crash.ok());
  EXPECT_EQ(crash->status, ExecStatus::kCrash);
  EXPECT_EQ(crash->reason, "B1");
  EXPECT_EQ(crash->trace.count(chunkfmt::kBugB1), 1u);
}

TEST(InProcessProviderTest, SlowCallIsReportedAsTimeout) {
  InProcessProvider p("slow", [](ByteSpan, EdgeTrace& t) {
    t.Hit(1);
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    return TargetResult{};
  });
  absl::StatusOr<ExecOutcome> out = p.Execute(Bytes{1}, 5);
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out->status, ExecStatus::kTimeout);
  EXPECT_EQ(out->trace.count(1), 1u);
  EXPECT_FALSE(p.Execute(Bytes{1}, 0).ok());
}

TEST(MakeProviderTest, UnknownTargetIsConfigurationError) {
  testing::ScopedTempDir dir;
  absl::StatusOr<std::unique_ptr<CoverageProvider>> p =
      MakeProvider("nope", dir.path());
  EXPECT_EQ(p.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(IsProviderError(p.status()));
  EXPECT_EQ(DefaultFormatTag("chunkfmt"), "CHUNKFMT");
  EXPECT_EQ(DefaultFormatTag("jsonish"), "JSON");
  EXPECT_EQ(DefaultFormatTag("cmd:./x @@"), "BIN");
}

TEST(ExternalCommandProviderTest, MatchesInProcessTarget) {
  testing::ScopedTempDir dir;
  auto in_proc = MustMake("chunkfmt", dir / "a");
  auto by_file = MustMake(std::string("cmd:") + STRUCTFUZZ_HARNESS + " @@", dir / "b");
  auto by_stdin = MustMake(std::string("cmd:") + STRUCTFUZZ_HARNESS, dir / "c");
  ASSERT_TRUE(in_proc && by_file && by_stdin);
  EXPECT_EQ(by_file->kind(), ProviderKind::kExternalCommand);
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    Bytes in = chunkfmt::BuildSeed(static_cast<uint32_t>(rng.Below(300)), 2,
                                   std::nullopt,
                                   {testing::RandomBytes(rng, rng.Below(9))});
    if (rng.OneIn(2)) in[rng.Below(in.size())] ^= 0x04;
    absl::StatusOr<ExecOutcome> want = in_proc->Execute(in, 1000);
    absl::StatusOr<ExecOutcome> got_file = by_file->Execute(in, 5000);
    absl::StatusOr<ExecOutcome> got_stdin = by_stdin->Execute(in, 5000);
    ASSERT_TRUE(want.ok());
    ASSERT_TRUE(got_file.ok()) << got_file.status();
    ASSERT_TRUE(got_stdin.ok()) << got_stdin.status();
    EXPECT_EQ(got_file->trace, want->trace);
    EXPECT_EQ(got_stdin->trace, want->trace);
    EXPECT_EQ(got_file->status, ExecStatus::kOk);
  }
}

TEST(ExternalCommandProviderTest, AbortIsCrash) {
  testing::ScopedTempDir dir;
  auto p = MustMake(std::string("cmd:") + STRUCTFUZZ_HARNESS + " @@", dir.path());
  ASSERT_NE(p, nullptr);
  absl::StatusOr<ExecOutcome> out =
      p->Execute(chunkfmt::BuildSeed(2, 2, 0, {}), 5000);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->status, ExecStatus::kCrash);
  EXPECT_EQ(out->reason, "signal_6");
  EXPECT_EQ(out->trace.count(chunkfmt::kBugB2), 1u);
}

TEST(ExternalCommandProviderTest, HangIsKilledAtTimeout) {
  testing::ScopedTempDir dir;
  auto p = MustMake("cmd:sleep 10", dir.path());
  ASSERT_NE(p, nullptr);
  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<ExecOutcome> out = p->Execute(Bytes{1}, 100);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->status, ExecStatus::kTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(3));
}

TEST(ExternalCommandProviderTest, BrokenCommandsAreProviderErrors) {
  testing::ScopedTempDir dir;
  auto missing = MustMake("cmd:/nonexistent/structfuzz-target @@", dir / "a");
  ASSERT_NE(missing, nullptr);
  absl::StatusOr<ExecOutcome> out = missing->Execute(Bytes{1}, 1000);
  EXPECT_TRUE(IsProviderError(out.status())) << out.status();

  auto no_dump = MustMake("cmd:true", dir / "b");
  ASSERT_NE(no_dump, nullptr);
  out = no_dump->Execute(Bytes{1}, 1000);
  EXPECT_TRUE(IsProviderError(out.status())) << out.status();
  EXPECT_THAT(std::string(out.status().message()), HasSubstr("SF_COV_FILE"));

  absl::StatusOr<std::unique_ptr<CoverageProvider>> empty =
      MakeProvider("cmd:", dir / "c");
  EXPECT_TRUE(IsProviderError(empty.status()));
}

}  // namespace
}  // namespace structfuzz
