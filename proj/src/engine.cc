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

#include "structfuzz/engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <system_error>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "structfuzz/archive.h"
#include "structfuzz/endpoints.h"

namespace structfuzz {
namespace {

std::string FormatSeconds(double s) { return absl::StrFormat("%.3f", s); }

// Rounds to the precision written to disk so in-memory and on-disk
// timestamps compare equal.
double RoundMillis(double s) { return std::round(s * 1000.0) / 1000.0; }

}  // namespace

absl::Status ValidateConfig(const CampaignConfig& config) {
  const int budgets = config.duration_s.has_value() +
                      config.iterations.has_value() +
                      config.max_execs.has_value();
  if (budgets != 1) {
    return absl::InvalidArgumentError(
        "exactly one of duration, iterations or execs must be set");
  }
  if (config.duration_s.has_value() && !(*config.duration_s > 0)) {
    return absl::InvalidArgumentError("duration must be > 0");
  }
  if (config.iterations == uint64_t{0} || config.max_execs == uint64_t{0}) {
    return absl::InvalidArgumentError("budget must be > 0");
  }
  if (config.queue_capacity < 1) {
    return absl::InvalidArgumentError("queue capacity must be >= 1");
  }
  if (config.max_hex_len < 1) {
    return absl::InvalidArgumentError("max hex length must be >= 1");
  }
  if (config.timeout_ms < 1) {
    return absl::InvalidArgumentError("timeout must be >= 1 ms");
  }
  if (!(config.stats_interval_s > 0)) {
    return absl::InvalidArgumentError("stats interval must be > 0");
  }
  if (config.corpus_dirs.empty()) {
    return absl::InvalidArgumentError("no initial corpus directory given");
  }
  for (const auto& dir : config.corpus_dirs) {
    if (!std::filesystem::is_directory(dir)) {
      return absl::InvalidArgumentError(
          absl::StrCat("corpus directory ", dir.string(), " does not exist"));
    }
  }
  if (config.out_dir.empty()) {
    return absl::InvalidArgumentError("no output directory given");
  }
  if (!config.format_tag.empty() && !IsValidFormatTag(config.format_tag)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "format tag '", config.format_tag, "' must match [A-Z0-9_]{1,16}"));
  }
  if (config.havoc_rounds < 1 || config.max_payload < 1) {
    return absl::InvalidArgumentError("havoc rounds and max payload must be >= 1");
  }
  return absl::OkStatus();
}

std::string FormatStatsRow(const StatsRow& r) {
  return absl::StrCat(FormatSeconds(r.elapsed_s), ",", r.iterations, ",",
                      r.execs, ",", r.edges_seen, ",", r.admitted_llm_direct,
                      ",", r.admitted_llm_descendant, ",", r.admitted_other,
                      ",", r.crashes, ",", r.void_responses, ",",
                      r.channel_offers, ",", r.channel_evictions, ",",
                      r.channel_deliveries);
}

absl::StatusOr<StatsRow> ParseStatsRow(absl::string_view line) {
  std::vector<absl::string_view> f = absl::StrSplit(line, ',');
  StatsRow r;
  if (f.size() != 12 || !absl::SimpleAtod(f[0], &r.elapsed_s) ||
      !absl::SimpleAtoi(f[1], &r.iterations) ||
      !absl::SimpleAtoi(f[2], &r.execs) ||
      !absl::SimpleAtoi(f[3], &r.edges_seen) ||
      !absl::SimpleAtoi(f[4], &r.admitted_llm_direct) ||
      !absl::SimpleAtoi(f[5], &r.admitted_llm_descendant) ||
      !absl::SimpleAtoi(f[6], &r.admitted_other) ||
      !absl::SimpleAtoi(f[7], &r.crashes) ||
      !absl::SimpleAtoi(f[8], &r.void_responses) ||
      !absl::SimpleAtoi(f[9], &r.channel_offers) ||
      !absl::SimpleAtoi(f[10], &r.channel_evictions) ||
      !absl::SimpleAtoi(f[11], &r.channel_deliveries)) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed stats row '", line, "'"));
  }
  return r;
}

Campaign::Campaign(CampaignConfig config,
                   std::unique_ptr<CoverageProvider> provider,
                   std::unique_ptr<MutatorEndpoint> endpoint)
    : config_(std::move(config)),
      provider_(std::move(provider)),
      rng_(config_.rng_seed) {
  if (config_.llm_enabled && endpoint != nullptr) {
    channel_ = std::make_unique<LlmChannel>(
        std::move(endpoint), ChannelOptions{.capacity = config_.queue_capacity});
  }
  virtual_clock_ = config_.clock == ClockMode::kVirtual ||
                   (config_.clock == ClockMode::kAuto &&
                    !config_.duration_s.has_value());
  format_tag_ = config_.format_tag.empty() ? DefaultFormatTag(config_.target)
                                           : config_.format_tag;
}

double Campaign::Now() const {
  if (virtual_clock_) {
    return RoundMillis(static_cast<double>(execs_) * kVirtualSecondsPerExec);
  }
  return RoundMillis(std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_)
                         .count());
}

bool Campaign::ExecBudgetExhausted() const {
  if (config_.iterations.has_value()) return false;
  return BudgetExhausted();
}

bool Campaign::BudgetExhausted() const {
  if (config_.iterations.has_value()) return iterations_ >= *config_.iterations;
  if (config_.max_execs.has_value()) return execs_ >= *config_.max_execs;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start_)
             .count() >= *config_.duration_s;
}

absl::Status Campaign::Setup() {
  queue_dir_ = config_.out_dir / kQueueDir;
  trace_dir_ = config_.out_dir / kTraceDir;
  crash_dir_ = config_.out_dir / kCrashDir;
  std::error_code ec;
  for (const auto& dir : {queue_dir_, trace_dir_, crash_dir_}) {
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      return absl::InvalidArgumentError(
          absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
    }
    if (!std::filesystem::is_empty(dir)) {
      return absl::FailedPreconditionError(
          absl::StrCat("output directory ", dir.string(), " is not empty"));
    }
  }
  const std::map<std::string, std::string> info = {
      {"target", config_.target},
      {"format_tag", format_tag_},
      {"rng_seed", absl::StrCat(config_.rng_seed)},
      {"llm_enabled", config_.llm_enabled ? "on" : "off"},
      {"deterministic", config_.deterministic ? "on" : "off"},
      {"clock", virtual_clock_ ? "virtual" : "wall"},
  };
  const std::string text = FormatKeyValues(info);
  if (absl::Status s = WriteFileBytes(config_.out_dir / kCampaignInfo,
                                      ToBytes(text));
      !s.ok()) {
    return s;
  }
  stats_csv_.open(config_.out_dir / kStatsCsv, std::ios::trunc);
  seeds_csv_.open(config_.out_dir / kSeedsCsv, std::ios::trunc);
  if (!stats_csv_ || !seeds_csv_) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot write into ", config_.out_dir.string()));
  }
  stats_csv_ << kStatsCsvHeader << '\n';
  seeds_csv_ << kSeedsCsvHeader << '\n';
  return absl::OkStatus();
}

absl::Status Campaign::LoadInitialSeeds() {
  std::vector<std::filesystem::path> files;
  for (const auto& dir : config_.corpus_dirs) {
    std::vector<std::filesystem::path> in_dir;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file()) in_dir.push_back(entry.path());
    }
    std::sort(in_dir.begin(), in_dir.end());
    files.insert(files.end(), in_dir.begin(), in_dir.end());
  }
  if (files.empty()) {
    return absl::InvalidArgumentError("initial corpus is empty");
  }
  for (const auto& path : files) {
    absl::StatusOr<Bytes> payload = ReadFileBytes(path);
    if (!payload.ok()) return absl::InvalidArgumentError(payload.status().message());
    if (payload->size() > config_.max_payload) payload->resize(config_.max_payload);
    if (absl::Status s = Triage(*std::move(payload), Origin::kInitial,
                                std::nullopt);
        !s.ok()) {
      return s;
    }
  }
  if (corpus_.empty()) {
    return absl::InvalidArgumentError(
        "no initial seed produced any coverage; nothing to fuzz");
  }
  return absl::OkStatus();
}

absl::Status Campaign::Triage(Bytes payload, Origin origin,
                              std::optional<SeedId> parent) {
  absl::StatusOr<ExecOutcome> outcome =
      provider_->Execute(payload, config_.timeout_ms);
  if (!outcome.ok()) {
    return IsProviderError(outcome.status())
               ? outcome.status()
               : ProviderError(outcome.status().message());
  }
  ++execs_;
  const bool crashed = outcome->status == ExecStatus::kCrash;
  if (outcome->status == ExecStatus::kTimeout) ++stats_.timeouts;
  std::vector<EdgeId> signature;
  if (crashed) {
    ++stats_.crash_execs;
    signature = coverage_.NewEdges(outcome->trace);
  }
  const NoveltyVerdict verdict = coverage_.Observe(outcome->trace);
  if (!verdict.is_interesting && !crashed) return absl::OkStatus();

  Seed seed;
  seed.id = corpus_.next_id();
  seed.payload = std::move(payload);
  seed.origin = origin;
  seed.parent_id = parent;
  seed.found_at = Now();
  seed.caused_crash = crashed;
  seed.format_tag = format_tag_;
  const size_t crashes_before = corpus_.crashes().size();
  const Seed snapshot = seed;
  absl::StatusOr<bool> admitted =
      corpus_.Admit(std::move(seed), verdict, std::move(signature),
                    outcome->reason);
  if (!admitted.ok()) return admitted.status();
  if (!*admitted) return absl::OkStatus();

  if (absl::Status s = PersistSeed(queue_dir_, snapshot); !s.ok()) return s;
  if (absl::Status s =
          WriteFileBytes(trace_dir_ / TraceFileName(snapshot.id),
                         ToBytes(FormatCoverageDump(outcome->trace)));
      !s.ok()) {
    return s;
  }
  seeds_csv_ << FormatSeedMetaRow(SeedMeta{
                    snapshot.id, snapshot.origin, snapshot.parent_id,
                    snapshot.found_at, snapshot.caused_crash,
                    verdict.new_edges, verdict.new_buckets, format_tag_})
             << '\n';
  if (corpus_.crashes().size() > crashes_before) {
    const CrashRecord& record = corpus_.crashes().back();
    stats_.crash_reasons.insert(record.detail);
    if (absl::Status s = PersistCrash(crash_dir_, record, snapshot.payload);
        !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

void Campaign::OfferToChannel(const Seed& seed) {
  HexSeed hex = Encode(seed.payload, format_tag_);
  if (GateLength(hex, nullptr, config_.max_hex_len) == GateResult::kSkip) {
    return;
  }
  channel_->Offer(MutationRequest{seed.id, format_tag_, std::move(hex.hex),
                                  Now()});
}

absl::Status Campaign::FuzzSeed(SeedId id) {
  // Copy: admissions below may grow the corpus.
  const Bytes payload = corpus_.Find(id)->payload;

  if (config_.deterministic && !deterministic_done_.contains(id)) {
    deterministic_done_.insert(id);
    if (payload.size() <= config_.deterministic_max_len) {
      DeterministicPass pass(payload);
      Bytes candidate;
      while (!ExecBudgetExhausted() && pass.Next(candidate)) {
        if (absl::Status s = Triage(std::move(candidate), Origin::kClassic, id);
            !s.ok()) {
          return s;
        }
        if (absl::Status s = MaybeFlushStats(false); !s.ok()) return s;
      }
      return absl::OkStatus();
    }
  }

  HavocOptions havoc;
  havoc.max_len = config_.max_payload;
  for (size_t round = 0; round < config_.havoc_rounds; ++round) {
    if (ExecBudgetExhausted()) break;
    Bytes candidate;
    if (corpus_.size() >= 2 && rng_.OneIn(config_.splice_one_in)) {
      const Seed& other = corpus_.seeds()[rng_.Below(corpus_.size())];
      absl::StatusOr<Bytes> spliced = Splice(payload, other.payload, rng_);
      candidate = Havoc(spliced.ok() ? *spliced : payload, rng_, havoc);
    } else {
      candidate = Havoc(payload, rng_, havoc);
    }
    if (absl::Status s = Triage(std::move(candidate), Origin::kClassic, id);
        !s.ok()) {
      return s;
    }
    if (absl::Status s = MaybeFlushStats(false); !s.ok()) return s;
  }
  return absl::OkStatus();
}

StatsRow Campaign::Snapshot() const {
  StatsRow row;
  row.elapsed_s = Now();
  row.iterations = iterations_;
  row.execs = execs_;
  row.edges_seen = coverage_.edges_seen();
  row.admitted_llm_direct = corpus_.CountLineage(Lineage::kLlmDirect);
  row.admitted_llm_descendant = corpus_.CountLineage(Lineage::kLlmDescendant);
  row.admitted_other = corpus_.CountLineage(Lineage::kNonLlm);
  row.crashes = corpus_.crashes().size();
  if (channel_ != nullptr) {
    const ChannelCounters& c = channel_->counters();
    row.void_responses = c.voids + c.malformed;
    row.channel_offers = c.offers;
    row.channel_evictions = c.evictions;
    row.channel_deliveries = c.deliveries;
  }
  return row;
}

absl::Status Campaign::MaybeFlushStats(bool final) {
  const double now = Now();
  if (!final && now < next_flush_) return absl::OkStatus();
  // Rows stay strictly ordered by time; a closing row taken at the instant
  // of the previous one is dropped (CampaignStats::final still has it).
  if (!stats_.rows.empty() && stats_.rows.back().elapsed_s >= now) {
    return absl::OkStatus();
  }
  stats_.rows.push_back(Snapshot());
  stats_csv_ << FormatStatsRow(stats_.rows.back()) << '\n';
  stats_csv_.flush();
  seeds_csv_.flush();
  next_flush_ = (std::floor(now / config_.stats_interval_s) + 1) *
                config_.stats_interval_s;
  if (!stats_csv_) {
    return absl::UnavailableError("cannot append to stats.csv");
  }
  return absl::OkStatus();
}

absl::StatusOr<CampaignStats> Campaign::Run() {
  if (absl::Status s = ValidateConfig(config_); !s.ok()) return s;
  if (provider_ == nullptr) return absl::InvalidArgumentError("no provider");
  start_ = std::chrono::steady_clock::now();
  if (absl::Status s = Setup(); !s.ok()) return s;
  if (absl::Status s = LoadInitialSeeds(); !s.ok()) return s;

  while (!BudgetExhausted()) {
    ++iterations_;
    if (channel_ != nullptr) {
      if (std::optional<MutationResponse> res = channel_->Pump()) {
        absl::StatusOr<Bytes> payload = Decode(*res->hex);
        if (payload.ok() && !payload->empty() &&
            corpus_.Find(res->seed_id) != nullptr) {
          if (payload->size() > config_.max_payload) {
            payload->resize(config_.max_payload);
          }
          if (absl::Status s =
                  Triage(*std::move(payload), Origin::kLlm, res->seed_id);
              !s.ok()) {
            return s;
          }
        }
      }
    }
    absl::StatusOr<Seed*> seed = corpus_.NextSeed();
    if (!seed.ok()) return seed.status();
    const SeedId id = (*seed)->id;
    if (channel_ != nullptr) OfferToChannel(**seed);
    if (absl::Status s = FuzzSeed(id); !s.ok()) return s;
    if (absl::Status s = MaybeFlushStats(false); !s.ok()) return s;
  }
  if (absl::Status s = MaybeFlushStats(true); !s.ok()) return s;
  stats_.final = Snapshot();
  stats_.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
  stats_csv_.close();
  seeds_csv_.close();
  return stats_;
}

absl::StatusOr<CampaignStats> RunCampaign(const CampaignConfig& config) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  std::error_code ec;
  if (std::filesystem::exists(config.out_dir, ec) &&
      !std::filesystem::is_empty(config.out_dir, ec)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "output directory ", config.out_dir.string(), " is not empty"));
  }
  absl::StatusOr<std::unique_ptr<CoverageProvider>> provider =
      MakeProvider(config.target, config.out_dir / ".work");
  if (!provider.ok()) {
    return IsProviderError(provider.status())
               ? provider.status()
               : absl::InvalidArgumentError(provider.status().message());
  }
  std::unique_ptr<MutatorEndpoint> endpoint;
  if (config.llm_enabled) {
    absl::StatusOr<std::unique_ptr<MutatorEndpoint>> made =
        MakeEndpoint(config.endpoint);
    if (!made.ok()) return made.status();
    endpoint = *std::move(made);
  }
  Campaign campaign(config, *std::move(provider), std::move(endpoint));
  return campaign.Run();
}

absl::StatusOr<std::vector<ReportRow>> ReportCoverage(
    const std::filesystem::path& out_dir) {
  absl::StatusOr<Bytes> stats = ReadFileBytes(out_dir / kStatsCsv);
  if (!stats.ok()) return stats.status();
  absl::StatusOr<Bytes> seeds = ReadFileBytes(out_dir / kSeedsCsv);
  if (!seeds.ok()) return seeds.status();

  struct Entry {
    double found_at;
    Lineage lineage;
  };
  std::vector<Entry> admissions;
  absl::flat_hash_map<SeedId, Lineage> lineage;
  bool header = true;
  for (absl::string_view line : absl::StrSplit(AsString(*seeds), '\n')) {
    if (line.empty()) continue;
    if (std::exchange(header, false)) continue;
    absl::StatusOr<SeedMeta> meta = ParseSeedMetaRow(line);
    if (!meta.ok()) return meta.status();
    // Rows are in admission order, so parents are always known already.
    Lineage l = Lineage::kNonLlm;
    if (meta->origin == Origin::kLlm) {
      l = Lineage::kLlmDirect;
    } else if (meta->parent_id.has_value()) {
      auto it = lineage.find(*meta->parent_id);
      if (it == lineage.end()) {
        return absl::DataLossError(absl::StrCat(
            (out_dir / kSeedsCsv).string(), ": seed ", meta->id,
            " references unknown parent ", *meta->parent_id));
      }
      if (it->second != Lineage::kNonLlm) l = Lineage::kLlmDescendant;
    }
    lineage[meta->id] = l;
    admissions.push_back({meta->found_at, l});
  }

  std::vector<ReportRow> rows;
  header = true;
  size_t next = 0;
  size_t counts[3] = {0, 0, 0};
  for (absl::string_view line : absl::StrSplit(AsString(*stats), '\n')) {
    if (line.empty()) continue;
    if (std::exchange(header, false)) {
      if (line != kStatsCsvHeader) {
        return absl::DataLossError(
            absl::StrCat((out_dir / kStatsCsv).string(), ": unexpected header"));
      }
      continue;
    }
    absl::StatusOr<StatsRow> row = ParseStatsRow(line);
    if (!row.ok()) return row.status();
    if (!rows.empty() && row->elapsed_s <= rows.back().elapsed_s) {
      return absl::DataLossError("stats.csv rows are not ordered by time");
    }
    while (next < admissions.size() &&
           admissions[next].found_at <= row->elapsed_s) {
      ++counts[static_cast<int>(admissions[next].lineage)];
      ++next;
    }
    rows.push_back(ReportRow{row->elapsed_s, row->edges_seen,
                             counts[static_cast<int>(Lineage::kLlmDirect)],
                             counts[static_cast<int>(Lineage::kLlmDescendant)],
                             counts[static_cast<int>(Lineage::kNonLlm)]});
  }
  return rows;
}

std::string FormatReportCsv(const std::vector<ReportRow>& rows) {
  std::string out = absl::StrCat(kReportCsvHeader, "\n");
  for (const ReportRow& r : rows) {
    absl::StrAppend(&out, FormatSeconds(r.elapsed_s), ",", r.edges_seen, ",",
                    r.admitted_llm_direct, ",", r.admitted_llm_descendant, ",",
                    r.admitted_other, "\n");
  }
  return out;
}

}  // namespace structfuzz
