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

#include "structfuzz/hexcodec.h"

#include <fstream>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/match.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "structfuzz/common.h"
#include "test_util.h"

namespace structfuzz {
namespace {

using ::testing::HasSubstr;
using ::testing::Not;

TEST(HexTest, EncodeIsLowercasePairs) {
  EXPECT_EQ(EncodeHex(Bytes{0x00, 0xab, 0x7f, 0xff}), "00ab7fff");
  HexSeed s = Encode(Bytes{0x46, 0x5a}, "CHUNKFMT");
  EXPECT_EQ(s.hex, "465a");
  EXPECT_EQ(s.format_tag, "CHUNKFMT");
  EXPECT_EQ(s.byte_len(), 2u);
  EXPECT_EQ(EncodeHex(Bytes{}), "");
}

TEST(HexTest, RoundTripRandom) {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const Bytes x = testing::RandomBytes(rng, rng.Below(300));
    const std::string hex = EncodeHex(x);
    ASSERT_EQ(*Decode(hex), x);
    ASSERT_EQ(SanitizeResponse(hex).value_or("<none>"),
              x.empty() ? "<none>" : hex);
  }
}

// Wire hex is lowercase; uppercase only gets through sanitizing first.
TEST(HexTest, DecodeIsLowercaseOnly) {
  EXPECT_EQ(Decode("ABcd").status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(*Decode(*SanitizeResponse("ABcd")), (Bytes{0xab, 0xcd}));
}

TEST(HexTest, DecodeRejectsMalformed) {
  absl::StatusOr<Bytes> odd = Decode("abc");
  EXPECT_EQ(odd.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(std::string(odd.status().message()), HasSubstr("MalformedHex"));
  EXPECT_EQ(Decode("zz").status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(Decode("0 ").status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(SanitizeTest, StripsPrefixesAndWhitespace) {
  EXPECT_EQ(SanitizeResponse("Ox00Ox00"), "0000");
  EXPECT_EQ(SanitizeResponse("0x46 0x5A\n0X30"), "465a30");
  EXPECT_EQ(SanitizeResponse("  46 5a 30 31 \t"), "465a3031");
  EXPECT_EQ(SanitizeResponse("ox1f"), "1f");
}

TEST(SanitizeTest, RejectsResidueThatIsNotHex) {
  EXPECT_EQ(SanitizeResponse(""), std::nullopt);
  EXPECT_EQ(SanitizeResponse("   "), std::nullopt);
  EXPECT_EQ(SanitizeResponse("0x"), std::nullopt);
  EXPECT_EQ(SanitizeResponse("abc"), std::nullopt);
  EXPECT_EQ(SanitizeResponse("hello"), std::nullopt);
}

TEST(GateTest, CountsBothSides) {
  EXPECT_EQ(GateLength(4096), GateResult::kPass);
  EXPECT_EQ(GateLength(4097), GateResult::kSkip);
  HexSeed a{std::string(2000, '0'), "X"};
  HexSeed b{std::string(2096, '0'), "X"};
  EXPECT_EQ(GateLength(a, &b), GateResult::kPass);
  b.hex += "00";
  EXPECT_EQ(GateLength(a, &b), GateResult::kSkip);
  EXPECT_EQ(GateLength(a, nullptr, 1999), GateResult::kSkip);
}

TEST(TextFormatTest, KnownTextTags) {
  EXPECT_TRUE(IsTextFormat("JSON"));
  EXPECT_TRUE(IsTextFormat("xml"));
  EXPECT_TRUE(IsTextFormat("Sql"));
  EXPECT_FALSE(IsTextFormat("CHUNKFMT"));
  EXPECT_FALSE(IsTextFormat("BIN"));
}

TEST(PromptTest, MutateOneHex) {
  absl::StatusOr<Prompt> p =
      BuildPrompt(PromptKind::kMutateOne, "CHUNKFMT", Bytes{0x46, 0x5a});
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(p->template_id, "mutate_one.hex.v1");
  EXPECT_THAT(p->text, HasSubstr("CHUNKFMT"));
  EXPECT_THAT(p->text, HasSubstr("465a"));
  EXPECT_THAT(p->text, Not(HasSubstr("{")));
}

TEST(PromptTest, FinetunePairTextUsesRawText) {
  absl::StatusOr<Prompt> p =
      BuildPrompt(PromptKind::kFinetunePair, "JSON", ToBytes("{\"a\":1}"),
                  ToBytes("{\"a\":[]}"));
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(p->template_id, "finetune_pair.text.v1");
  EXPECT_THAT(p->text, HasSubstr("{\"a\":1}"));
  EXPECT_THAT(p->text, HasSubstr("{\"a\":[]}"));
  EXPECT_THAT(p->text, Not(HasSubstr("{SEED}")));
}

TEST(PromptTest, PlaceholderInsidePayloadIsNotExpanded) {
  absl::StatusOr<Prompt> p = BuildPrompt(PromptKind::kFinetunePair, "JSON",
                                         ToBytes("{MUTATED}"), ToBytes("x"));
  ASSERT_TRUE(p.ok());
  EXPECT_THAT(p->text, HasSubstr("{MUTATED}"));
}

TEST(PromptTest, LengthGateAndMissingSecondSeed) {
  const Bytes big(2049, 0);
  EXPECT_EQ(BuildPrompt(PromptKind::kMutateOne, "BIN", big).status().code(),
            absl::StatusCode::kOutOfRange);
  const Bytes half(1024, 0);
  EXPECT_TRUE(BuildPrompt(PromptKind::kFinetunePair, "BIN", half, half).ok());
  const Bytes over(1025, 0);
  absl::StatusOr<Prompt> gated =
      BuildPrompt(PromptKind::kFinetunePair, "BIN", half, over);
  EXPECT_EQ(gated.status().code(), absl::StatusCode::kOutOfRange);
  EXPECT_THAT(std::string(gated.status().message()), HasSubstr("LengthGate"));
  EXPECT_EQ(BuildPrompt(PromptKind::kFinetunePair, "BIN", half).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PromptTemplatesTest, LoadFromDirMatchesCompiledIn) {
  absl::StatusOr<PromptTemplates> loaded =
      PromptTemplates::LoadFromDir(STRUCTFUZZ_PROMPT_DIR);
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  const PromptTemplates& def = PromptTemplates::Default();
  EXPECT_EQ(loaded->mutate_one_hex, def.mutate_one_hex);
  EXPECT_EQ(loaded->mutate_one_text, def.mutate_one_text);
  EXPECT_EQ(loaded->finetune_pair_hex, def.finetune_pair_hex);
  EXPECT_EQ(loaded->finetune_pair_text, def.finetune_pair_text);
}

TEST(PromptTemplatesTest, LoadFromDirValidatesPlaceholders) {
  testing::ScopedTempDir dir;
  for (const char* stem : {"mutate_one.hex", "mutate_one.text",
                           "finetune_pair.hex", "finetune_pair.text"}) {
    std::ofstream(dir / (std::string(stem) + ".v9.txt"))
        << "{FORMAT} {SEED}";  // pair templates lack {MUTATED}
  }
  EXPECT_EQ(PromptTemplates::LoadFromDir(dir.path(), "v9").status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(PromptTemplates::LoadFromDir(dir.path(), "v3").status().code(),
            absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace structfuzz
