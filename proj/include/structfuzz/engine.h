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

// The fuzzing loop: schedule a seed, hand it to the mutation channel, mutate
// it with the classic operators, execute and triage every candidate.
//
// Each iteration:
//   (a) pump the channel; a delivered mutation is executed first, as a
//       candidate of origin llm whose parent is the requested seed;
//   (b) pick the next seed;
//   (c) offer it to the channel when enabled and within the hex gate;
//   (d) run its deterministic stage if it never ran (payloads up to 4 KiB),
//       otherwise a round of havoc / splice+havoc candidates;
//   (e) execute and triage each candidate.

#ifndef STRUCTFUZZ_ENGINE_H_
#define STRUCTFUZZ_ENGINE_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "structfuzz/channel.h"
#include "structfuzz/corpus.h"
#include "structfuzz/coverage.h"
#include "structfuzz/executor.h"
#include "structfuzz/hexcodec.h"
#include "structfuzz/mutation.h"

namespace structfuzz {

// kVirtual advances campaign time by kVirtualSecondsPerExec per execution,
// which makes timestamps (and therefore every output file) reproducible.
// kAuto picks kVirtual for iteration and execution budgets and kWall for
// duration budgets.
enum class ClockMode { kAuto, kWall, kVirtual };
inline constexpr double kVirtualSecondsPerExec = 1e-3;

struct CampaignConfig {
  std::string target = "chunkfmt";
  std::vector<std::filesystem::path> corpus_dirs;
  std::filesystem::path out_dir;
  // Exactly one budget must be set.
  std::optional<double> duration_s;
  std::optional<uint64_t> iterations;
  std::optional<uint64_t> max_execs;
  uint64_t rng_seed = 0;
  bool llm_enabled = false;
  std::string endpoint = "unix:/tmp/structfuzz-mutator.sock";
  size_t queue_capacity = kDefaultQueueCapacity;
  size_t max_hex_len = kDefaultMaxHexLen;
  uint32_t timeout_ms = kDefaultTimeoutMs;
  std::string format_tag;  // empty: derived from the target
  double stats_interval_s = 5.0;
  ClockMode clock = ClockMode::kAuto;
  bool deterministic = true;  // off: havoc and splice only
  size_t havoc_rounds = 64;
  size_t splice_one_in = 8;
  size_t max_payload = kDefaultMaxPayload;
  size_t deterministic_max_len = 4096;
};

absl::Status ValidateConfig(const CampaignConfig& config);

struct StatsRow {
  double elapsed_s = 0;
  uint64_t iterations = 0;
  uint64_t execs = 0;
  size_t edges_seen = 0;
  size_t admitted_llm_direct = 0;
  size_t admitted_llm_descendant = 0;
  size_t admitted_other = 0;
  size_t crashes = 0;
  uint64_t void_responses = 0;
  uint64_t channel_offers = 0;
  uint64_t channel_evictions = 0;
  uint64_t channel_deliveries = 0;

  bool operator==(const StatsRow&) const = default;
};

inline constexpr absl::string_view kStatsCsvHeader =
    "elapsed_s,iterations,execs,edges_seen,admitted_llm_direct,"
    "admitted_llm_descendant,admitted_other,crashes,void_responses,"
    "channel_offers,channel_evictions,channel_deliveries";
std::string FormatStatsRow(const StatsRow& row);
absl::StatusOr<StatsRow> ParseStatsRow(absl::string_view line);

struct CampaignStats {
  std::vector<StatsRow> rows;  // as written to stats.csv
  StatsRow final;
  uint64_t crash_execs = 0;
  uint64_t timeouts = 0;
  std::set<std::string> crash_reasons;  // labels of deduplicated crashes
  double wall_seconds = 0;

  bool operator==(const CampaignStats&) const = default;
};

class Campaign {
 public:
  // `endpoint` may be null when the channel is disabled.
  Campaign(CampaignConfig config, std::unique_ptr<CoverageProvider> provider,
           std::unique_ptr<MutatorEndpoint> endpoint);

  absl::StatusOr<CampaignStats> Run();

  const Corpus& corpus() const { return corpus_; }
  const CoverageMap& coverage() const { return coverage_; }
  const LlmChannel* channel() const { return channel_.get(); }

 private:
  absl::Status Setup();
  absl::Status LoadInitialSeeds();
  absl::Status Triage(Bytes payload, Origin origin,
                      std::optional<SeedId> parent);
  absl::Status FuzzSeed(SeedId id);
  bool BudgetExhausted() const;
  // Budget checks inside an iteration; an iteration budget only ends the
  // campaign between iterations.
  bool ExecBudgetExhausted() const;
  double Now() const;
  void OfferToChannel(const Seed& seed);
  absl::Status MaybeFlushStats(bool final);
  StatsRow Snapshot() const;

  CampaignConfig config_;
  std::unique_ptr<CoverageProvider> provider_;
  std::unique_ptr<LlmChannel> channel_;
  bool virtual_clock_ = false;
  std::string format_tag_;

  Corpus corpus_;
  CoverageMap coverage_;
  Rng rng_;
  absl::flat_hash_set<SeedId> deterministic_done_;
  CampaignStats stats_;
  uint64_t execs_ = 0;
  uint64_t iterations_ = 0;
  double next_flush_ = 0;
  std::chrono::steady_clock::time_point start_;

  std::filesystem::path queue_dir_;
  std::filesystem::path trace_dir_;
  std::filesystem::path crash_dir_;
  std::ofstream stats_csv_;
  std::ofstream seeds_csv_;
};

// Builds the provider and endpoint named by `config` and runs the campaign.
absl::StatusOr<CampaignStats> RunCampaign(const CampaignConfig& config);

struct ReportRow {
  double elapsed_s = 0;
  size_t edges_seen = 0;
  size_t admitted_llm_direct = 0;
  size_t admitted_llm_descendant = 0;
  size_t admitted_other = 0;

  bool operator==(const ReportRow&) const = default;
};

// Coverage over time with admissions split by lineage, recomputed from the
// persisted stats.csv and seeds.csv of a campaign output directory.
absl::StatusOr<std::vector<ReportRow>> ReportCoverage(
    const std::filesystem::path& out_dir);

inline constexpr absl::string_view kReportCsvHeader =
    "elapsed_s,edges_seen,admitted_llm_direct,admitted_llm_descendant,"
    "admitted_other";
std::string FormatReportCsv(const std::vector<ReportRow>& rows);

}  // namespace structfuzz

#endif  // STRUCTFUZZ_ENGINE_H_
