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

#include "structfuzz/corpus.h"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace structfuzz {

absl::string_view OriginName(Origin origin) {
  switch (origin) {
    case Origin::kInitial:
      return "initial";
    case Origin::kClassic:
      return "classic";
    case Origin::kLlm:
      return "llm";
  }
  return "?";
}

std::optional<Origin> ParseOrigin(absl::string_view name) {
  if (name == "initial") return Origin::kInitial;
  if (name == "classic") return Origin::kClassic;
  if (name == "llm") return Origin::kLlm;
  return std::nullopt;
}

absl::string_view LineageName(Lineage lineage) {
  switch (lineage) {
    case Lineage::kLlmDirect:
      return "llm_direct";
    case Lineage::kLlmDescendant:
      return "llm_descendant";
    case Lineage::kNonLlm:
      return "non_llm";
  }
  return "?";
}

absl::StatusOr<bool> Corpus::Admit(Seed seed, const NoveltyVerdict& verdict,
                                   std::vector<EdgeId> crash_signature,
                                   std::string crash_detail) {
  if (index_.contains(seed.id)) {
    return absl::AlreadyExistsError(
        absl::StrCat("seed id ", seed.id, " already in corpus"));
  }
  if (seed.id < next_id_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "seed id ", seed.id, " is below the next free id ", next_id_));
  }
  if ((seed.origin == Origin::kInitial) == seed.parent_id.has_value()) {
    return absl::InvalidArgumentError(
        "initial seeds have no parent and every other seed has one");
  }
  if (seed.parent_id.has_value() && !index_.contains(*seed.parent_id)) {
    return absl::NotFoundError(
        absl::StrCat("parent ", *seed.parent_id, " of seed ", seed.id,
                     " is not in the corpus"));
  }

  bool new_crash = false;
  if (seed.caused_crash) {
    auto [it, inserted] = crash_signatures_.insert(crash_signature);
    if (inserted) {
      new_crash = true;
      crashes_.push_back(CrashRecord{seed.id, std::move(crash_signature),
                                     std::move(crash_detail)});
    }
  }
  if (!verdict.is_interesting && !new_crash) return false;

  Lineage lineage = Lineage::kNonLlm;
  if (seed.origin == Origin::kLlm) {
    lineage = Lineage::kLlmDirect;
  } else if (seed.parent_id.has_value() &&
             lineage_[index_.at(*seed.parent_id)] != Lineage::kNonLlm) {
    lineage = Lineage::kLlmDescendant;
  }

  const size_t pos = seeds_.size();
  index_.emplace(seed.id, pos);
  next_id_ = seed.id + 1;
  seed.exec_count = 0;
  seeds_.push_back(std::move(seed));
  lineage_.push_back(lineage);
  ++lineage_counts_[static_cast<int>(lineage)];
  fresh_.push_back(pos);
  return true;
}

absl::StatusOr<Seed*> Corpus::NextSeed() {
  if (seeds_.empty()) {
    return absl::FailedPreconditionError("corpus is empty");
  }
  size_t pos;
  if (!fresh_.empty()) {
    pos = fresh_.front();
    fresh_.pop_front();
  } else {
    pos = cursor_ % seeds_.size();
    cursor_ = pos + 1;
  }
  Seed& seed = seeds_[pos];
  ++seed.exec_count;
  return &seed;
}

absl::StatusOr<Lineage> Corpus::LineageOrigin(SeedId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    return absl::NotFoundError(absl::StrCat("unknown seed id ", id));
  }
  return lineage_[it->second];
}

const Seed* Corpus::Find(SeedId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &seeds_[it->second];
}

Seed* Corpus::Find(SeedId id) {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &seeds_[it->second];
}

size_t Corpus::CountLineage(Lineage lineage) const {
  return lineage_counts_[static_cast<int>(lineage)];
}

std::string SeedFileName(const Seed& seed) {
  return absl::StrFormat(
      "id_%06d,src_%s,parent_%s", seed.id, OriginName(seed.origin),
      seed.parent_id.has_value() ? absl::StrFormat("%06d", *seed.parent_id)
                                 : std::string("none"));
}

std::optional<SeedFileInfo> ParseSeedFileName(absl::string_view name) {
  std::vector<absl::string_view> parts = absl::StrSplit(name, ',');
  if (parts.size() != 3) return std::nullopt;
  SeedFileInfo info;
  absl::string_view id = parts[0];
  absl::string_view src = parts[1];
  absl::string_view parent = parts[2];
  if (!absl::ConsumePrefix(&id, "id_") || !absl::SimpleAtoi(id, &info.id)) {
    return std::nullopt;
  }
  if (!absl::ConsumePrefix(&src, "src_")) return std::nullopt;
  std::optional<Origin> origin = ParseOrigin(src);
  if (!origin.has_value()) return std::nullopt;
  info.origin = *origin;
  if (!absl::ConsumePrefix(&parent, "parent_")) return std::nullopt;
  if (parent != "none") {
    SeedId parent_id;
    if (!absl::SimpleAtoi(parent, &parent_id)) return std::nullopt;
    info.parent_id = parent_id;
  }
  return info;
}

absl::StatusOr<Bytes> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  }
  Bytes data((std::istreambuf_iterator<char>(in)),
             std::istreambuf_iterator<char>());
  if (in.bad()) {
    return absl::DataLossError(absl::StrCat("read failed: ", path.string()));
  }
  return data;
}

absl::Status WriteFileBytes(const std::filesystem::path& path, ByteSpan data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) {
    return absl::UnavailableError(absl::StrCat("write failed: ", path.string()));
  }
  return absl::OkStatus();
}

absl::Status PersistSeed(const std::filesystem::path& queue_dir,
                         const Seed& seed) {
  return WriteFileBytes(queue_dir / SeedFileName(seed), seed.payload);
}

absl::Status PersistCrash(const std::filesystem::path& crash_dir,
                          const CrashRecord& record, ByteSpan payload) {
  uint64_t sig_hash = Fnv1a({});
  for (EdgeId edge : record.signature) {
    const uint8_t le[4] = {static_cast<uint8_t>(edge), static_cast<uint8_t>(edge >> 8),
                           static_cast<uint8_t>(edge >> 16),
                           static_cast<uint8_t>(edge >> 24)};
    sig_hash = Fnv1a(le, sig_hash);
  }
  const std::string name = absl::StrFormat(
      "id_%06d,sig_%016x,%s", record.seed_id, sig_hash,
      record.detail.empty() ? std::string("crash") : record.detail);
  return WriteFileBytes(crash_dir / name, payload);
}

}  // namespace structfuzz
