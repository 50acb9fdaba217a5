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

#include "structfuzz/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "structfuzz/mutation.h"

namespace structfuzz {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kNoiseAttempts = 64;

struct RealPair {
  const ArchivedSeed* parent;
  const std::string* format_tag;
};

}  // namespace

absl::string_view CriterionName(Criterion c) {
  switch (c) {
    case Criterion::kNewPath:
      return "new_path";
    case Criterion::kHitcountChange:
      return "hitcount_change";
    case Criterion::kCrash:
      return "crash";
  }
  return "?";
}

std::optional<Criterion> ParseCriterion(absl::string_view name) {
  if (name == "new_path") return Criterion::kNewPath;
  if (name == "hitcount_change") return Criterion::kHitcountChange;
  if (name == "crash") return Criterion::kCrash;
  return std::nullopt;
}

std::vector<Criterion> DetectValuable(const NoveltyVerdict& verdict,
                                      bool crashed) {
  std::vector<Criterion> out;
  if (verdict.new_edges > 0) {
    out.push_back(Criterion::kNewPath);
  } else if (verdict.new_buckets > 0) {
    out.push_back(Criterion::kHitcountChange);
  }
  if (crashed) out.push_back(Criterion::kCrash);
  return out;
}

absl::StatusOr<DatasetResult> BuildPairs(std::span<const RunArchive> archives,
                                         const DatasetOptions& options) {
  if (!(options.noise_ratio >= 0.0 && options.noise_ratio <= 0.5)) {
    return absl::InvalidArgumentError("noise_ratio must be in [0, 0.5]");
  }
  if (options.max_hex_len == 0) {
    return absl::InvalidArgumentError("max_hex_len must be > 0");
  }
  DatasetResult result;
  std::vector<RealPair> real;

  for (const RunArchive& archive : archives) {
    if (std::find(options.exclude_targets.begin(),
                  options.exclude_targets.end(),
                  archive.target) != options.exclude_targets.end()) {
      ++result.excluded_archives;
      continue;
    }
    for (const ArchivedSeed& child : archive.seeds) {
      if (!child.meta.parent_id.has_value()) continue;  // initial seeds
      const std::vector<Criterion> criteria = DetectValuable(
          NoveltyVerdict{child.meta.new_edges, child.meta.new_buckets,
                         child.meta.new_edges + child.meta.new_buckets > 0},
          child.meta.caused_crash);
      if (criteria.empty()) continue;
      const ArchivedSeed* parent = archive.Find(*child.meta.parent_id);
      if (parent == nullptr) {
        ++result.skipped_unresolved;
        continue;
      }
      const std::string& tag = child.meta.format_tag.empty()
                                   ? archive.format_tag
                                   : child.meta.format_tag;
      absl::StatusOr<Prompt> prompt =
          BuildPrompt(PromptKind::kFinetunePair, tag, parent->payload,
                      ByteSpan(child.payload), options.max_hex_len);
      if (!prompt.ok()) {
        ++result.skipped_gate;
        continue;
      }
      result.pairs.push_back(FinetunePair{tag, criteria, false,
                                          std::move(prompt->text),
                                          EncodeHex(parent->payload),
                                          EncodeHex(child.payload)});
      real.push_back(RealPair{parent, &tag});
    }
  }
  result.real_pairs = result.pairs.size();

  const size_t wanted = static_cast<size_t>(std::ceil(
      options.noise_ratio * static_cast<double>(result.real_pairs) - 1e-9));
  Rng rng(options.rng_seed);
  for (size_t n = 0; n < wanted && !real.empty(); ++n) {
    bool made = false;
    for (int attempt = 0; attempt < kNoiseAttempts && !made; ++attempt) {
      const RealPair& pick = real[rng.Below(real.size())];
      const Bytes& parent = pick.parent->payload;
      const size_t budget = options.max_hex_len / 2;
      if (parent.empty() || parent.size() >= budget) continue;
      HavocOptions havoc;
      havoc.max_len = budget - parent.size();
      const Bytes noise = Havoc(parent, rng, havoc);
      absl::StatusOr<Prompt> prompt =
          BuildPrompt(PromptKind::kFinetunePair, *pick.format_tag, parent,
                      ByteSpan(noise), options.max_hex_len);
      if (!prompt.ok()) continue;
      result.pairs.push_back(FinetunePair{*pick.format_tag, {}, true,
                                          std::move(prompt->text),
                                          EncodeHex(parent), EncodeHex(noise)});
      ++result.noise_pairs;
      made = true;
    }
    if (!made) ++result.noise_failed;
  }
  return result;
}

std::string SerializePair(const FinetunePair& pair) {
  ordered_json j;
  j["format_tag"] = pair.format_tag;
  ordered_json criteria = ordered_json::array();
  for (Criterion c : pair.criteria) criteria.push_back(CriterionName(c));
  j["criteria"] = std::move(criteria);
  j["is_noise"] = pair.is_noise;
  j["prompt"] = pair.prompt;
  j["original_hex"] = pair.original_hex;
  j["mutated_hex"] = pair.mutated_hex;
  return j.dump();
}

absl::StatusOr<FinetunePair> ParsePair(absl::string_view line) {
  ordered_json j = ordered_json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("record is not a JSON object");
  }
  static constexpr absl::string_view kFields[] = {
      "format_tag", "criteria", "is_noise", "prompt", "original_hex",
      "mutated_hex"};
  if (j.size() != std::size(kFields)) {
    return absl::InvalidArgumentError("record has unexpected fields");
  }
  size_t i = 0;
  for (const auto& item : j.items()) {
    if (item.key() != kFields[i++]) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", item.key(), "' out of order"));
    }
  }
  FinetunePair pair;
  if (!j["format_tag"].is_string() || !j["criteria"].is_array() ||
      !j["is_noise"].is_boolean() || !j["prompt"].is_string() ||
      !j["original_hex"].is_string() || !j["mutated_hex"].is_string()) {
    return absl::InvalidArgumentError("record field has the wrong type");
  }
  pair.format_tag = j["format_tag"].get<std::string>();
  for (const auto& c : j["criteria"]) {
    if (!c.is_string()) return absl::InvalidArgumentError("criterion not a string");
    std::optional<Criterion> parsed = ParseCriterion(c.get<std::string>());
    if (!parsed.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown criterion '", c.get<std::string>(), "'"));
    }
    pair.criteria.push_back(*parsed);
  }
  pair.is_noise = j["is_noise"].get<bool>();
  pair.prompt = j["prompt"].get<std::string>();
  pair.original_hex = j["original_hex"].get<std::string>();
  pair.mutated_hex = j["mutated_hex"].get<std::string>();
  if (!Decode(pair.original_hex).ok() || !Decode(pair.mutated_hex).ok()) {
    return absl::InvalidArgumentError("record carries malformed hex");
  }
  return pair;
}

absl::Status ExportPairs(const std::filesystem::path& path,
                         std::span<const FinetunePair> pairs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(absl::StrCat("cannot write ", path.string()));
  }
  for (const FinetunePair& pair : pairs) out << SerializePair(pair) << '\n';
  out.close();
  if (!out) {
    return absl::UnavailableError(absl::StrCat("write failed: ", path.string()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<FinetunePair>> ImportPairs(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  std::vector<FinetunePair> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    absl::StatusOr<FinetunePair> pair = ParsePair(line);
    if (!pair.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          path.string(), ":", line_no, ": ", pair.status().message()));
    }
    pairs.push_back(*std::move(pair));
  }
  return pairs;
}

}  // namespace structfuzz
