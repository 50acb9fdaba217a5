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

// Campaign output directory layout, shared by the engine (writer) and the
// dataset builder and reporter (readers).
//
//   <out>/queue/id_<id>,src_<origin>,parent_<parent>   seed payloads
//   <out>/traces/id_<id>.cov      raw edge trace of the admitting execution
//   <out>/seeds.csv               per-seed metadata, one row per admission
//   <out>/crashes/                one file per deduplicated crash signature
//   <out>/stats.csv               periodic campaign statistics
//   <out>/campaign.txt            key=value description of the campaign

#ifndef STRUCTFUZZ_ARCHIVE_H_
#define STRUCTFUZZ_ARCHIVE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "structfuzz/common.h"
#include "structfuzz/corpus.h"
#include "structfuzz/coverage.h"

namespace structfuzz {

inline constexpr char kQueueDir[] = "queue";
inline constexpr char kTraceDir[] = "traces";
inline constexpr char kCrashDir[] = "crashes";
inline constexpr char kSeedsCsv[] = "seeds.csv";
inline constexpr char kStatsCsv[] = "stats.csv";
inline constexpr char kCampaignInfo[] = "campaign.txt";

struct SeedMeta {
  SeedId id = 0;
  Origin origin = Origin::kInitial;
  std::optional<SeedId> parent_id;
  double found_at = 0;
  bool caused_crash = false;
  size_t new_edges = 0;
  size_t new_buckets = 0;
  std::string format_tag;
};

inline constexpr absl::string_view kSeedsCsvHeader =
    "id,origin,parent,found_at_s,caused_crash,new_edges,new_buckets,"
    "format_tag";
std::string FormatSeedMetaRow(const SeedMeta& meta);
absl::StatusOr<SeedMeta> ParseSeedMetaRow(absl::string_view row);

std::string TraceFileName(SeedId id);

// Flat key=value file; '#' starts a comment line.
absl::StatusOr<std::map<std::string, std::string>> ReadKeyValueFile(
    const std::filesystem::path& path);
std::string FormatKeyValues(const std::map<std::string, std::string>& kv);

struct ArchivedSeed {
  SeedMeta meta;
  Bytes payload;
  EdgeTrace trace;
};

// A finished (or running) campaign's output directory loaded into memory.
struct RunArchive {
  std::filesystem::path dir;
  std::string target;
  std::string format_tag;
  std::vector<ArchivedSeed> seeds;  // ascending id

  const ArchivedSeed* Find(SeedId id) const;
};

absl::StatusOr<RunArchive> LoadRunArchive(const std::filesystem::path& dir);

}  // namespace structfuzz

#endif  // STRUCTFUZZ_ARCHIVE_H_
