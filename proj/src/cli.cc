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

#include "structfuzz/cli.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include "absl/strings/string_view.h"
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_replace.h"
#include "absl/strings/str_split.h"
#include "structfuzz/archive.h"
#include "structfuzz/common.h"
#include "structfuzz/corpus.h"
#include "structfuzz/dataset.h"
#include "structfuzz/engine.h"

namespace structfuzz {
namespace {

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  return IsProviderError(status) ? kExitProviderError : kExitConfigError;
}

// Options as they come off the command line, before validation.
struct FuzzFlags {
  std::string target = "chunkfmt";
  std::vector<std::string> corpus;
  std::string out;
  double duration = 0;
  uint64_t iters = 0;
  uint64_t execs = 0;
  uint64_t rng_seed = 0;
  std::string llm = "off";
  std::string endpoint = CampaignConfig{}.endpoint;
  size_t queue_cap = kDefaultQueueCapacity;
  size_t max_hex_len = kDefaultMaxHexLen;
  uint32_t timeout_ms = kDefaultTimeoutMs;
  std::string format;
  double stats_interval = 5.0;
  std::string clock = "auto";
  std::string deterministic = "on";
};

struct DatasetFlags {
  std::vector<std::string> archives;
  std::string out;
  double noise_ratio = 0.1;
  size_t max_hex_len = kDefaultMaxHexLen;
  std::vector<std::string> exclude;
  uint64_t rng_seed = 0;
};

struct ReportFlags {
  std::string out_dir;
  std::string csv;
};

// Expands `--config <file>` into flags appended after the command-line ones.
// Keys are long flag names without dashes ('_' and '-' are equivalent);
// keys that the command line sets explicitly are skipped, so flags win.
absl::StatusOr<std::vector<std::string>> ExpandConfig(
    const std::vector<std::string>& args, const CLI::App& sub) {
  std::vector<std::string> rest;
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
      continue;
    }
    if (absl::StartsWith(args[i], "--config=")) {
      config_path = args[i].substr(9);
      continue;
    }
    rest.push_back(args[i]);
  }
  if (config_path.empty()) return rest;

  absl::StatusOr<std::map<std::string, std::string>> kv =
      ReadKeyValueFile(config_path);
  if (!kv.ok()) return kv.status();
  std::vector<std::string> from_file;
  for (const auto& [raw_key, value] : *kv) {
    const std::string key = absl::StrReplaceAll(raw_key, {{"_", "-"}});
    const std::string flag = absl::StrCat("--", key);
    const CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option(flag);
    } catch (const CLI::OptionNotFound&) {
    }
    if (opt == nullptr || key == "help") {
      return absl::InvalidArgumentError(
          absl::StrCat(config_path, ": unknown key '", raw_key, "'"));
    }
    const bool on_command_line =
        std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
          return a == flag || absl::StartsWith(a, flag + "=");
        });
    if (on_command_line) continue;
    if (opt->get_expected_max() > 1 || opt->get_items_expected_max() > 1) {
      for (absl::string_view item : absl::StrSplit(value, ',', absl::SkipEmpty())) {
        from_file.push_back(flag);
        from_file.emplace_back(item);
      }
    } else {
      from_file.push_back(flag);
      from_file.push_back(value);
    }
  }
  rest.insert(rest.end(), from_file.begin(), from_file.end());
  return rest;
}

void AddFuzzOptions(CLI::App& app, FuzzFlags& f) {
  app.add_option("--target", f.target,
                 "Target: chunkfmt, jsonish or cmd:<command with @@>")
      ->capture_default_str();
  app.add_option("--corpus", f.corpus, "Initial corpus directory (repeatable)")
      ->required();
  app.add_option("--out", f.out, "Output directory")->required();
  app.add_option("--duration", f.duration, "Budget in wall-clock seconds");
  app.add_option("--iters", f.iters, "Budget in loop iterations");
  app.add_option("--execs", f.execs, "Budget in target executions");
  app.add_option("--rng-seed", f.rng_seed, "Random seed")->capture_default_str();
  app.add_option("--llm", f.llm, "Mutation channel on|off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  app.add_option("--endpoint", f.endpoint,
                 "Mutator endpoint: unix:<path>, <host>:<port> or inproc:stub")
      ->capture_default_str();
  app.add_option("--queue-cap", f.queue_cap, "Channel queue capacity")
      ->capture_default_str();
  app.add_option("--max-hex-len", f.max_hex_len,
                 "Largest hex payload offered to the channel")
      ->capture_default_str();
  app.add_option("--timeout-ms", f.timeout_ms, "Per-execution timeout")
      ->capture_default_str();
  app.add_option("--format", f.format,
                 "Format tag sent with seeds (default derived from target)");
  app.add_option("--stats-interval", f.stats_interval,
                 "Seconds between stats.csv rows")
      ->capture_default_str();
  app.add_option("--clock", f.clock, "Campaign clock: auto|wall|virtual")
      ->check(CLI::IsMember({"auto", "wall", "virtual"}))
      ->capture_default_str();
  app.add_option("--deterministic", f.deterministic,
                 "Deterministic stage once per seed on|off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  app.add_option("--config", "key=value file with defaults for these flags");
}

void AddDatasetOptions(CLI::App& app, DatasetFlags& f) {
  app.add_option("--archive", f.archives,
                 "Campaign output directory (repeatable)")
      ->required();
  app.add_option("--out", f.out, "Output directory for pairs.jsonl")
      ->required();
  app.add_option("--noise-ratio", f.noise_ratio,
                 "Noise pairs per real pair, in [0, 0.5]")
      ->capture_default_str();
  app.add_option("--max-hex-len", f.max_hex_len, "Largest combined hex pair")
      ->capture_default_str();
  app.add_option("--exclude", f.exclude, "Target name to leave out (repeatable)");
  app.add_option("--rng-seed", f.rng_seed, "Random seed for noise pairs")
      ->capture_default_str();
  app.add_option("--config", "key=value file with defaults for these flags");
}

void AddReportOptions(CLI::App& app, ReportFlags& f) {
  app.add_option("--out-dir", f.out_dir, "Campaign output directory")
      ->required();
  app.add_option("--csv", f.csv, "Write the table here instead of stdout");
  app.add_option("--config", "key=value file with defaults for these flags");
}

absl::StatusOr<CampaignConfig> ToConfig(const FuzzFlags& f,
                                        const CLI::App& app) {
  CampaignConfig c;
  c.target = f.target;
  for (const std::string& dir : f.corpus) c.corpus_dirs.emplace_back(dir);
  c.out_dir = f.out;
  if (app.count("--duration") > 0) c.duration_s = f.duration;
  if (app.count("--iters") > 0) c.iterations = f.iters;
  if (app.count("--execs") > 0) c.max_execs = f.execs;
  c.rng_seed = f.rng_seed;
  c.llm_enabled = f.llm == "on";
  c.deterministic = f.deterministic == "on";
  c.endpoint = f.endpoint;
  c.queue_capacity = f.queue_cap;
  c.max_hex_len = f.max_hex_len;
  c.timeout_ms = f.timeout_ms;
  c.format_tag = f.format;
  c.stats_interval_s = f.stats_interval;
  c.clock = f.clock == "wall"      ? ClockMode::kWall
            : f.clock == "virtual" ? ClockMode::kVirtual
                                   : ClockMode::kAuto;
  if (absl::Status s = ValidateConfig(c); !s.ok()) return s;
  return c;
}

int RunFuzz(const FuzzFlags& flags, const CLI::App& app, std::ostream& out,
            std::ostream& err) {
  absl::StatusOr<CampaignConfig> config = ToConfig(flags, app);
  if (!config.ok()) {
    err << "structfuzz fuzz: " << config.status().message() << "\n";
    return kExitConfigError;
  }
  absl::StatusOr<CampaignStats> stats = RunCampaign(*config);
  if (!stats.ok()) {
    err << "structfuzz fuzz: " << stats.status().message() << "\n";
    return ExitCodeFor(stats.status());
  }
  const StatsRow& s = stats->final;
  out << absl::StrFormat(
      "edges=%d execs=%d iterations=%d crashes=%d llm_direct=%d "
      "llm_descendant=%d other=%d void_responses=%d\n",
      s.edges_seen, s.execs, s.iterations, s.crashes, s.admitted_llm_direct,
      s.admitted_llm_descendant, s.admitted_other, s.void_responses);
  return kExitOk;
}

int RunDataset(const DatasetFlags& flags, std::ostream& out,
               std::ostream& err) {
  std::vector<RunArchive> archives;
  for (const std::string& dir : flags.archives) {
    absl::StatusOr<RunArchive> archive = LoadRunArchive(dir);
    if (!archive.ok()) {
      err << "structfuzz dataset build: " << archive.status().message() << "\n";
      return kExitConfigError;
    }
    archives.push_back(*std::move(archive));
  }
  DatasetOptions options;
  options.max_hex_len = flags.max_hex_len;
  options.noise_ratio = flags.noise_ratio;
  options.rng_seed = flags.rng_seed;
  options.exclude_targets = flags.exclude;
  absl::StatusOr<DatasetResult> result = BuildPairs(archives, options);
  if (!result.ok()) {
    err << "structfuzz dataset build: " << result.status().message() << "\n";
    return kExitConfigError;
  }
  std::error_code ec;
  std::filesystem::create_directories(flags.out, ec);
  const std::filesystem::path path =
      std::filesystem::path(flags.out) / "pairs.jsonl";
  if (absl::Status s = ExportPairs(path, result->pairs); !s.ok()) {
    err << "structfuzz dataset build: " << s.message() << "\n";
    return kExitConfigError;
  }
  out << absl::StrFormat(
      "pairs=%d real=%d noise=%d skipped_gate=%d skipped_unresolved=%d "
      "excluded_archives=%d file=%s\n",
      result->pairs.size(), result->real_pairs, result->noise_pairs,
      result->skipped_gate, result->skipped_unresolved,
      result->excluded_archives, path.string());
  return kExitOk;
}

int RunReport(const ReportFlags& flags, std::ostream& out, std::ostream& err) {
  absl::StatusOr<std::vector<ReportRow>> rows = ReportCoverage(flags.out_dir);
  if (!rows.ok()) {
    err << "structfuzz report coverage: " << rows.status().message() << "\n";
    return kExitConfigError;
  }
  const std::string csv = FormatReportCsv(*rows);
  if (flags.csv.empty()) {
    out << csv;
    return kExitOk;
  }
  if (absl::Status s = WriteFileBytes(flags.csv, ToBytes(csv)); !s.ok()) {
    err << "structfuzz report coverage: " << s.message() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app("Coverage-guided fuzzer with an asynchronous structured "
               "mutation channel",
               "structfuzz");
  app.require_subcommand(1);
  FuzzFlags fuzz_flags;
  DatasetFlags dataset_flags;
  ReportFlags report_flags;
  CLI::App* fuzz = app.add_subcommand("fuzz", "Run a fuzzing campaign");
  AddFuzzOptions(*fuzz, fuzz_flags);
  CLI::App* dataset = app.add_subcommand("dataset", "Fine-tuning data");
  dataset->require_subcommand(1);
  CLI::App* build =
      dataset->add_subcommand("build", "Build seed pairs from campaign archives");
  AddDatasetOptions(*build, dataset_flags);
  CLI::App* report = app.add_subcommand("report", "Campaign reports");
  report->require_subcommand(1);
  CLI::App* coverage = report->add_subcommand(
      "coverage", "Coverage over time split by seed lineage");
  AddReportOptions(*coverage, report_flags);

  // Pick the leaf subcommand to resolve a --config file against.
  std::vector<std::string> tail(args.begin() + std::min<size_t>(1, args.size()),
                                args.end());
  const CLI::App* leaf = nullptr;
  if (!tail.empty() && tail[0] == "fuzz") leaf = fuzz;
  if (tail.size() >= 2 && tail[0] == "dataset" && tail[1] == "build") leaf = build;
  if (tail.size() >= 2 && tail[0] == "report" && tail[1] == "coverage") {
    leaf = coverage;
  }
  if (leaf != nullptr) {
    absl::StatusOr<std::vector<std::string>> expanded = ExpandConfig(tail, *leaf);
    if (!expanded.ok()) {
      err << "structfuzz: " << expanded.status().message() << "\n";
      return kExitConfigError;
    }
    tail = *std::move(expanded);
  }

  try {
    std::vector<std::string> reversed(tail.rbegin(), tail.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = app.get_subcommands().empty() ? &app : nullptr;
    if (target == nullptr) {
      target = app.get_subcommands().front();
      while (!target->get_subcommands().empty()) {
        target = target->get_subcommands().front();
      }
    }
    std::string help = target->help();
    if (target != &app) {
      std::string path = target->get_name();
      for (const CLI::App* p = target->get_parent(); p != nullptr;
           p = p->get_parent()) {
        path = absl::StrCat(p->get_name(), " ", path);
      }
      const std::string from = absl::StrCat("Usage: ", target->get_name());
      if (absl::StartsWith(help.substr(help.find("Usage: ")), from)) {
        help.replace(help.find("Usage: "), from.size(),
                     absl::StrCat("Usage: ", path));
      }
    }
    out << help;
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "structfuzz: " << e.what() << "\n";
    const CLI::App* target = leaf != nullptr ? leaf : &app;
    err << target->help();
    return kExitConfigError;
  }

  if (fuzz->parsed()) return RunFuzz(fuzz_flags, *fuzz, out, err);
  if (build->parsed()) return RunDataset(dataset_flags, out, err);
  if (coverage->parsed()) return RunReport(report_flags, out, err);
  err << app.help();
  return kExitConfigError;
}

}  // namespace structfuzz
