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

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "prompt_templates.h"
#include "structfuzz/corpus.h"

namespace structfuzz {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

// Substitutes placeholders in a single left-to-right pass so that payload
// text that happens to contain "{SEED}" is never expanded again.
std::string Render(absl::string_view tmpl, absl::string_view format,
                   absl::string_view seed, absl::string_view mutated) {
  std::string out;
  out.reserve(tmpl.size() + seed.size() + mutated.size() + 32);
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const absl::string_view rest = tmpl.substr(i);
      if (absl::StartsWith(rest, "{FORMAT}")) {
        absl::StrAppend(&out, format);
        i += 8;
        continue;
      }
      if (absl::StartsWith(rest, "{SEED}")) {
        absl::StrAppend(&out, seed);
        i += 6;
        continue;
      }
      if (absl::StartsWith(rest, "{MUTATED}")) {
        absl::StrAppend(&out, mutated);
        i += 9;
        continue;
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

}  // namespace

std::string EncodeHex(ByteSpan payload) {
  std::string hex;
  hex.resize(payload.size() * 2);
  for (size_t i = 0; i < payload.size(); ++i) {
    hex[2 * i] = kHexDigits[payload[i] >> 4];
    hex[2 * i + 1] = kHexDigits[payload[i] & 0xf];
  }
  return hex;
}

HexSeed Encode(ByteSpan payload, absl::string_view format_tag) {
  return HexSeed{EncodeHex(payload), std::string(format_tag)};
}

absl::StatusOr<Bytes> Decode(absl::string_view hex) {
  if (hex.size() % 2 != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("MalformedHex: odd length ", hex.size()));
  }
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    const int hi = HexValue(hex[2 * i]);
    const int lo = HexValue(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("MalformedHex: bad character at offset ",
                       hi < 0 ? 2 * i : 2 * i + 1));
    }
    out[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::optional<std::string> SanitizeResponse(absl::string_view raw) {
  std::string residue;
  residue.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (absl::ascii_isspace(static_cast<unsigned char>(c))) continue;
    if ((c == '0' || c == 'O' || c == 'o') && i + 1 < raw.size() &&
        (raw[i + 1] == 'x' || raw[i + 1] == 'X')) {
      ++i;
      continue;
    }
    residue.push_back(absl::ascii_tolower(static_cast<unsigned char>(c)));
  }
  if (residue.empty() || !Decode(residue).ok()) return std::nullopt;
  return residue;
}

GateResult GateLength(size_t hex_chars, size_t max_len) {
  return hex_chars <= max_len ? GateResult::kPass : GateResult::kSkip;
}

GateResult GateLength(const HexSeed& a, const HexSeed* b, size_t max_len) {
  return GateLength(a.hex.size() + (b != nullptr ? b->hex.size() : 0),
                    max_len);
}

bool IsTextFormat(absl::string_view format_tag) {
  for (absl::string_view text : {"JSON", "XML", "LUA", "PHP", "SQL"}) {
    if (absl::EqualsIgnoreCase(format_tag, text)) return true;
  }
  return false;
}

const PromptTemplates& PromptTemplates::Default() {
  static const PromptTemplates* templates = new PromptTemplates{
      prompts::kMutateOneHex, prompts::kMutateOneText,
      prompts::kFinetunePairHex, prompts::kFinetunePairText};
  return *templates;
}

absl::StatusOr<PromptTemplates> PromptTemplates::LoadFromDir(
    const std::filesystem::path& dir, absl::string_view version) {
  PromptTemplates loaded;
  struct Slot {
    absl::string_view stem;
    std::string* target;
    bool needs_mutated;
  };
  const Slot slots[] = {
      {"mutate_one.hex", &loaded.mutate_one_hex, false},
      {"mutate_one.text", &loaded.mutate_one_text, false},
      {"finetune_pair.hex", &loaded.finetune_pair_hex, true},
      {"finetune_pair.text", &loaded.finetune_pair_text, true},
  };
  for (const Slot& slot : slots) {
    const std::filesystem::path path =
        dir / absl::StrCat(slot.stem, ".", version, ".txt");
    absl::StatusOr<Bytes> data = ReadFileBytes(path);
    if (!data.ok()) return data.status();
    *slot.target = AsString(*data);
    if (!absl::StrContains(*slot.target, "{FORMAT}") ||
        !absl::StrContains(*slot.target, "{SEED}") ||
        slot.needs_mutated != absl::StrContains(*slot.target, "{MUTATED}")) {
      return absl::InvalidArgumentError(
          absl::StrCat("template ", path.string(),
                       " is missing a required placeholder"));
    }
  }
  return loaded;
}

absl::StatusOr<Prompt> BuildPrompt(PromptKind kind,
                                   absl::string_view format_tag, ByteSpan seed,
                                   std::optional<ByteSpan> mutated,
                                   size_t max_len,
                                   const PromptTemplates& templates) {
  if (kind == PromptKind::kFinetunePair && !mutated.has_value()) {
    return absl::InvalidArgumentError("finetune pair prompt needs two seeds");
  }
  const size_t mutated_len =
      kind == PromptKind::kFinetunePair ? mutated->size() : 0;
  const size_t hex_chars = 2 * (seed.size() + mutated_len);
  if (GateLength(hex_chars, max_len) == GateResult::kSkip) {
    return absl::OutOfRangeError(absl::StrCat(
        "LengthGate: ", hex_chars, " hex characters exceed ", max_len));
  }
  const bool text = IsTextFormat(format_tag);
  auto payload_text = [text](ByteSpan bytes) {
    return text ? AsString(bytes) : EncodeHex(bytes);
  };
  Prompt prompt;
  if (kind == PromptKind::kMutateOne) {
    prompt.template_id = absl::StrCat("mutate_one.", text ? "text" : "hex",
                                      ".", prompts::kVersion);
    prompt.text = Render(text ? templates.mutate_one_text
                              : templates.mutate_one_hex,
                         format_tag, payload_text(seed), "");
  } else {
    prompt.template_id = absl::StrCat("finetune_pair.", text ? "text" : "hex",
                                      ".", prompts::kVersion);
    prompt.text = Render(text ? templates.finetune_pair_text
                              : templates.finetune_pair_hex,
                         format_tag, payload_text(seed),
                         payload_text(*mutated));
  }
  return prompt;
}

}  // namespace structfuzz
