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

// Fine-tuning data: picks valuable seeds out of campaign archives, pairs each
// with its parent, hex-encodes and gates the pair, mixes in havoc-made noise
// pairs and writes everything as JSON lines.

#ifndef STRUCTFUZZ_DATASET_H_
#define STRUCTFUZZ_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "structfuzz/archive.h"
#include "structfuzz/coverage.h"
#include "structfuzz/hexcodec.h"

namespace structfuzz {

enum class Criterion { kNewPath, kHitcountChange, kCrash };

absl::string_view CriterionName(Criterion c);
std::optional<Criterion> ParseCriterion(absl::string_view name);

// new_path: new edges. hitcount_change: no new edge but a new bucket.
// crash: the execution crashed. The first two never both hold.
std::vector<Criterion> DetectValuable(const NoveltyVerdict& verdict,
                                      bool crashed);

struct FinetunePair {
  std::string format_tag;
  std::vector<Criterion> criteria;
  bool is_noise = false;
  std::string prompt;
  std::string original_hex;
  std::string mutated_hex;

  bool operator==(const FinetunePair&) const = default;
};

struct DatasetOptions {
  size_t max_hex_len = kDefaultMaxHexLen;
  double noise_ratio = 0.1;  // in [0, 0.5]
  uint64_t rng_seed = 0;
  std::vector<std::string> exclude_targets;
};

struct DatasetResult {
  std::vector<FinetunePair> pairs;
  size_t real_pairs = 0;
  size_t noise_pairs = 0;
  size_t skipped_gate = 0;
  size_t skipped_unresolved = 0;
  size_t noise_failed = 0;
  size_t excluded_archives = 0;
};

absl::StatusOr<DatasetResult> BuildPairs(std::span<const RunArchive> archives,
                                         const DatasetOptions& options);

std::string SerializePair(const FinetunePair& pair);
absl::StatusOr<FinetunePair> ParsePair(absl::string_view line);

absl::Status ExportPairs(const std::filesystem::path& path,
                         std::span<const FinetunePair> pairs);
absl::StatusOr<std::vector<FinetunePair>> ImportPairs(
    const std::filesystem::path& path);

}  // namespace structfuzz

#endif  // STRUCTFUZZ_DATASET_H_
