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

// Binary <-> hex conversion, length gating, prompt rendering and cleanup of
// mutator replies.

#ifndef STRUCTFUZZ_HEXCODEC_H_
#define STRUCTFUZZ_HEXCODEC_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "structfuzz/common.h"

namespace structfuzz {

inline constexpr size_t kDefaultMaxHexLen = 4096;

struct HexSeed {
  std::string hex;  // lowercase, even length
  std::string format_tag;

  size_t byte_len() const { return hex.size() / 2; }
};

HexSeed Encode(ByteSpan payload, absl::string_view format_tag = {});
std::string EncodeHex(ByteSpan payload);

// Strict inverse of EncodeHex. Odd length or a character outside [0-9a-f]
// is a MalformedHex error (InvalidArgument).
absl::StatusOr<Bytes> Decode(absl::string_view hex);

// Normalizes free-form mutator output to lowercase hex: drops whitespace and
// any "0x"/"Ox" markers (any case). Returns nullopt (a void reply) when
// nothing decodable remains.
std::optional<std::string> SanitizeResponse(absl::string_view raw);

enum class GateResult { kPass, kSkip };

// Passes when the combined hex length of `a` and `b` is at most max_len.
GateResult GateLength(const HexSeed& a, const HexSeed* b,
                      size_t max_len = kDefaultMaxHexLen);
GateResult GateLength(size_t hex_chars, size_t max_len = kDefaultMaxHexLen);

// Tags whose seeds go into prompts as raw text instead of hex.
bool IsTextFormat(absl::string_view format_tag);

enum class PromptKind { kFinetunePair, kMutateOne };

// Template text with {FORMAT}, {SEED} and {MUTATED} placeholders.
struct PromptTemplates {
  std::string mutate_one_hex;
  std::string mutate_one_text;
  std::string finetune_pair_hex;
  std::string finetune_pair_text;

  // The templates compiled into the binary (prompts/*.v1.txt).
  static const PromptTemplates& Default();
  // Loads <dir>/{mutate_one,finetune_pair}.{hex,text}.<version>.txt.
  static absl::StatusOr<PromptTemplates> LoadFromDir(
      const std::filesystem::path& dir, absl::string_view version = "v1");
};

struct Prompt {
  std::string template_id;
  std::string text;
};

// `mutated` is required for kFinetunePair and ignored for kMutateOne.
// Fails with a LengthGate error (OutOfRange) when the payloads exceed
// max_len hex characters.
absl::StatusOr<Prompt> BuildPrompt(
    PromptKind kind, absl::string_view format_tag, ByteSpan seed,
    std::optional<ByteSpan> mutated = std::nullopt,
    size_t max_len = kDefaultMaxHexLen,
    const PromptTemplates& templates = PromptTemplates::Default());

}  // namespace structfuzz

#endif  // STRUCTFUZZ_HEXCODEC_H_
