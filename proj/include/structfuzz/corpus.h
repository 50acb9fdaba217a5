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

// Seed storage, round-robin scheduling, lineage tracking and crash triage.

#ifndef STRUCTFUZZ_CORPUS_H_
#define STRUCTFUZZ_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "structfuzz/common.h"
#include "structfuzz/coverage.h"

namespace structfuzz {

enum class Origin { kInitial, kClassic, kLlm };

absl::string_view OriginName(Origin origin);
std::optional<Origin> ParseOrigin(absl::string_view name);

enum class Lineage { kLlmDirect, kLlmDescendant, kNonLlm };

absl::string_view LineageName(Lineage lineage);

struct Seed {
  SeedId id = 0;
  Bytes payload;
  Origin origin = Origin::kInitial;
  std::optional<SeedId> parent_id;
  // Number of times the scheduler handed this seed out.
  uint64_t exec_count = 0;
  double found_at = 0;
  bool caused_crash = false;
  std::string format_tag;
};

struct CrashRecord {
  SeedId seed_id = 0;
  // Edges first seen by the crashing execution, ascending.
  std::vector<EdgeId> signature;
  std::string detail;
};

// In-memory corpus owned by the fuzzing loop.
//
// Ids are assigned by the caller (see next_id()) and must be strictly
// increasing, so parent links always point backwards and ancestor walks
// terminate.
class Corpus {
 public:
  Corpus() = default;

  // Keeps `seed` when the verdict is interesting or when it is a crash with a
  // signature not recorded before. Crashing seeds always go through crash
  // dedup, whether or not they are kept for scheduling.
  absl::StatusOr<bool> Admit(Seed seed, const NoveltyVerdict& verdict,
                             std::vector<EdgeId> crash_signature = {},
                             std::string crash_detail = {});

  // Unfuzzed seeds first (in admission order), then round-robin over all.
  absl::StatusOr<Seed*> NextSeed();

  absl::StatusOr<Lineage> LineageOrigin(SeedId id) const;

  const Seed* Find(SeedId id) const;
  Seed* Find(SeedId id);

  SeedId next_id() const { return next_id_; }
  size_t size() const { return seeds_.size(); }
  bool empty() const { return seeds_.empty(); }
  const std::deque<Seed>& seeds() const { return seeds_; }
  const std::vector<CrashRecord>& crashes() const { return crashes_; }

  // Number of admitted seeds per lineage class.
  size_t CountLineage(Lineage lineage) const;

 private:
  std::deque<Seed> seeds_;
  absl::flat_hash_map<SeedId, size_t> index_;
  std::vector<Lineage> lineage_;
  std::deque<size_t> fresh_;
  size_t cursor_ = 0;
  SeedId next_id_ = 1;
  std::vector<CrashRecord> crashes_;
  absl::flat_hash_set<std::vector<EdgeId>> crash_signatures_;
  size_t lineage_counts_[3] = {0, 0, 0};
};

// On-disk layout. Seed files live in <out>/queue and are named
// "id_<id>,src_<origin>,parent_<parent|none>" with ids zero-padded to six
// digits; crash files live in <out>/crashes.
std::string SeedFileName(const Seed& seed);

struct SeedFileInfo {
  SeedId id = 0;
  Origin origin = Origin::kInitial;
  std::optional<SeedId> parent_id;
};
std::optional<SeedFileInfo> ParseSeedFileName(absl::string_view name);

absl::Status PersistSeed(const std::filesystem::path& queue_dir,
                         const Seed& seed);
absl::Status PersistCrash(const std::filesystem::path& crash_dir,
                          const CrashRecord& record, ByteSpan payload);

absl::StatusOr<Bytes> ReadFileBytes(const std::filesystem::path& path);
absl::Status WriteFileBytes(const std::filesystem::path& path, ByteSpan data);

}  // namespace structfuzz

#endif  // STRUCTFUZZ_CORPUS_H_
