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

// Runs a target on one input and returns its status and edge trace.

#ifndef STRUCTFUZZ_EXECUTOR_H_
#define STRUCTFUZZ_EXECUTOR_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "structfuzz/common.h"
#include "structfuzz/coverage.h"
#include "structfuzz/targets/target.h"

namespace structfuzz {

inline constexpr uint32_t kDefaultTimeoutMs = 1000;
inline constexpr absl::string_view kCoverageFileEnv = "SF_COV_FILE";

enum class ExecStatus { kOk, kCrash, kTimeout };

absl::string_view ExecStatusName(ExecStatus status);

struct ExecOutcome {
  ExecStatus status = ExecStatus::kOk;
  EdgeTrace trace;  // may be partial on timeout
  int64_t wall_us = 0;
  std::string reason;  // crash label or signal name
};

enum class ProviderKind { kInProcess, kExternalCommand };

class CoverageProvider {
 public:
  virtual ~CoverageProvider() = default;

  // Errors are ProviderError()s: the provider itself is broken, as opposed to
  // the target misbehaving on this input.
  virtual absl::StatusOr<ExecOutcome> Execute(ByteSpan payload,
                                              uint32_t timeout_ms) = 0;
  virtual ProviderKind kind() const = 0;
  virtual std::string name() const = 0;
};

// Calls a registered function with an edge recorder. The call cannot be
// interrupted; an over-long call is reported as a timeout afterwards.
class InProcessProvider : public CoverageProvider {
 public:
  InProcessProvider(std::string name, InProcessTarget target)
      : name_(std::move(name)), target_(std::move(target)) {}

  absl::StatusOr<ExecOutcome> Execute(ByteSpan payload,
                                      uint32_t timeout_ms) override;
  ProviderKind kind() const override { return ProviderKind::kInProcess; }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  InProcessTarget target_;
};

// Spawns `command` once per input. "@@" in any argument is replaced with the
// path of a file holding the input; without "@@" the input goes to stdin.
// The target writes its coverage to the file named by $SF_COV_FILE as
// "<edge_id> <count>\n" lines sorted by edge id. Death by signal is a crash.
class ExternalCommandProvider : public CoverageProvider {
 public:
  static absl::StatusOr<std::unique_ptr<ExternalCommandProvider>> Create(
      absl::string_view command, const std::filesystem::path& work_dir);

  absl::StatusOr<ExecOutcome> Execute(ByteSpan payload,
                                      uint32_t timeout_ms) override;
  ProviderKind kind() const override { return ProviderKind::kExternalCommand; }
  std::string name() const override { return command_; }

 private:
  ExternalCommandProvider(std::string command, std::vector<std::string> argv,
                          std::filesystem::path work_dir);

  std::string command_;
  std::vector<std::string> argv_;
  bool uses_file_arg_ = false;
  std::filesystem::path input_path_;
  std::filesystem::path coverage_path_;
};

absl::StatusOr<EdgeTrace> ParseCoverageDump(absl::string_view text);
std::string FormatCoverageDump(const EdgeTrace& trace);

// Known in-process targets: "chunkfmt", "jsonish".
absl::StatusOr<InProcessTarget> LookupTarget(absl::string_view name);

// "chunkfmt", "jsonish", or "cmd:<command line>".
absl::StatusOr<std::unique_ptr<CoverageProvider>> MakeProvider(
    absl::string_view target_spec, const std::filesystem::path& work_dir);

// Format tag used when none is configured.
std::string DefaultFormatTag(absl::string_view target_spec);

}  // namespace structfuzz

#endif  // STRUCTFUZZ_EXECUTOR_H_
