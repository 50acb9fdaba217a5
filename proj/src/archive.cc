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

#include "structfuzz/archive.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <system_error>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "structfuzz/executor.h"

namespace structfuzz {

std::string FormatSeedMetaRow(const SeedMeta& m) {
  return absl::StrFormat(
      "%d,%s,%s,%.3f,%d,%d,%d,%s", m.id, OriginName(m.origin),
      m.parent_id.has_value() ? absl::StrCat(*m.parent_id) : "",
      m.found_at, m.caused_crash ? 1 : 0, m.new_edges, m.new_buckets,
      m.format_tag);
}

absl::StatusOr<SeedMeta> ParseSeedMetaRow(absl::string_view row) {
  std::vector<absl::string_view> f = absl::StrSplit(row, ',');
  auto bad = [&](absl::string_view what) {
    return absl::InvalidArgumentError(
        absl::StrCat("seeds.csv: bad ", what, " in row '", row, "'"));
  };
  if (f.size() != 8) return bad("field count");
  SeedMeta m;
  if (!absl::SimpleAtoi(f[0], &m.id)) return bad("id");
  std::optional<Origin> origin = ParseOrigin(f[1]);
  if (!origin.has_value()) return bad("origin");
  m.origin = *origin;
  if (!f[2].empty()) {
    SeedId parent;
    if (!absl::SimpleAtoi(f[2], &parent)) return bad("parent");
    m.parent_id = parent;
  }
  if (!absl::SimpleAtod(f[3], &m.found_at)) return bad("found_at_s");
  int crash;
  if (!absl::SimpleAtoi(f[4], &crash) || (crash != 0 && crash != 1)) {
    return bad("caused_crash");
  }
  m.caused_crash = crash == 1;
  if (!absl::SimpleAtoi(f[5], &m.new_edges)) return bad("new_edges");
  if (!absl::SimpleAtoi(f[6], &m.new_buckets)) return bad("new_buckets");
  m.format_tag = std::string(f[7]);
  return m;
}

std::string TraceFileName(SeedId id) {
  return absl::StrFormat("id_%06d.cov", id);
}

absl::StatusOr<std::map<std::string, std::string>> ReadKeyValueFile(
    const std::filesystem::path& path) {
  absl::StatusOr<Bytes> data = ReadFileBytes(path);
  if (!data.ok()) return data.status();
  std::map<std::string, std::string> kv;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(AsString(*data), '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat(path.string(), ":", line_no, ": expected key=value"));
    }
    kv[std::string(absl::StripAsciiWhitespace(line.substr(0, eq)))] =
        std::string(absl::StripAsciiWhitespace(line.substr(eq + 1)));
  }
  return kv;
}

std::string FormatKeyValues(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) absl::StrAppend(&out, k, "=", v, "\n");
  return out;
}

const ArchivedSeed* RunArchive::Find(SeedId id) const {
  auto it = std::lower_bound(
      seeds.begin(), seeds.end(), id,
      [](const ArchivedSeed& s, SeedId v) { return s.meta.id < v; });
  return it != seeds.end() && it->meta.id == id ? &*it : nullptr;
}

absl::StatusOr<RunArchive> LoadRunArchive(const std::filesystem::path& dir) {
  RunArchive archive;
  archive.dir = dir;
  absl::StatusOr<std::map<std::string, std::string>> info =
      ReadKeyValueFile(dir / kCampaignInfo);
  if (!info.ok()) return info.status();
  archive.target = (*info)["target"];
  archive.format_tag = (*info)["format_tag"];

  absl::StatusOr<Bytes> csv = ReadFileBytes(dir / kSeedsCsv);
  if (!csv.ok()) return csv.status();
  bool header = true;
  for (absl::string_view row : absl::StrSplit(AsString(*csv), '\n')) {
    if (row.empty()) continue;
    if (header) {
      header = false;
      if (row != kSeedsCsvHeader) {
        return absl::InvalidArgumentError(
            absl::StrCat((dir / kSeedsCsv).string(), ": unexpected header"));
      }
      continue;
    }
    absl::StatusOr<SeedMeta> meta = ParseSeedMetaRow(row);
    if (!meta.ok()) return meta.status();
    archive.seeds.push_back(ArchivedSeed{*std::move(meta), {}, {}});
  }

  // Payloads come from the queue directory, keyed by the id in the name.
  absl::flat_hash_map<SeedId, std::filesystem::path> queue_files;
  std::error_code ec;
  for (const auto& entry :
       std::filesystem::directory_iterator(dir / kQueueDir, ec)) {
    std::optional<SeedFileInfo> parsed =
        ParseSeedFileName(entry.path().filename().string());
    if (parsed.has_value()) queue_files[parsed->id] = entry.path();
  }
  if (ec) {
    return absl::NotFoundError(absl::StrCat(
        "cannot list ", (dir / kQueueDir).string(), ": ", ec.message()));
  }

  std::sort(archive.seeds.begin(), archive.seeds.end(),
            [](const ArchivedSeed& a, const ArchivedSeed& b) {
              return a.meta.id < b.meta.id;
            });
  for (ArchivedSeed& seed : archive.seeds) {
    auto it = queue_files.find(seed.meta.id);
    if (it == queue_files.end()) {
      return absl::NotFoundError(absl::StrCat(
          "seed ", seed.meta.id, " has no file in ", (dir / kQueueDir).string()));
    }
    absl::StatusOr<Bytes> payload = ReadFileBytes(it->second);
    if (!payload.ok()) return payload.status();
    seed.payload = *std::move(payload);
    const std::filesystem::path trace_path =
        dir / kTraceDir / TraceFileName(seed.meta.id);
    absl::StatusOr<Bytes> dump = ReadFileBytes(trace_path);
    if (!dump.ok()) return dump.status();
    absl::StatusOr<EdgeTrace> trace = ParseCoverageDump(AsString(*dump));
    if (!trace.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(trace_path.string(), ": ", trace.status().message()));
    }
    seed.trace = *std::move(trace);
  }
  return archive;
}

}  // namespace structfuzz
