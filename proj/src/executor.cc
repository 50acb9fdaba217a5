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

#include "structfuzz/executor.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include "absl/strings/string_view.h"
#include <system_error>
#include <thread>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_replace.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "structfuzz/corpus.h"
#include "structfuzz/targets/chunkfmt.h"
#include "structfuzz/targets/jsonish.h"

extern char** environ;

namespace structfuzz {
namespace {

using Clock = std::chrono::steady_clock;

int64_t MicrosSince(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() -
                                                               start)
      .count();
}

}  // namespace

absl::string_view ExecStatusName(ExecStatus status) {
  switch (status) {
    case ExecStatus::kOk:
      return "ok";
    case ExecStatus::kCrash:
      return "crash";
    case ExecStatus::kTimeout:
      return "timeout";
  }
  return "?";
}

absl::StatusOr<ExecOutcome> InProcessProvider::Execute(ByteSpan payload,
                                                       uint32_t timeout_ms) {
  if (timeout_ms == 0) return absl::InvalidArgumentError("timeout_ms must be > 0");
  ExecOutcome outcome;
  const auto start = Clock::now();
  TargetResult result = target_(payload, outcome.trace);
  outcome.wall_us = MicrosSince(start);
  if (result.crashed) {
    outcome.status = ExecStatus::kCrash;
    outcome.reason = std::move(result.reason);
  } else if (outcome.wall_us > int64_t{timeout_ms} * 1000) {
    outcome.status = ExecStatus::kTimeout;
  }
  return outcome;
}

ExternalCommandProvider::ExternalCommandProvider(
    std::string command, std::vector<std::string> argv,
    std::filesystem::path work_dir)
    : command_(std::move(command)),
      argv_(std::move(argv)),
      input_path_(work_dir / ".cur_input"),
      coverage_path_(work_dir / ".cur_coverage") {
  for (const std::string& arg : argv_) {
    if (absl::StrContains(arg, "@@")) uses_file_arg_ = true;
  }
}

absl::StatusOr<std::unique_ptr<ExternalCommandProvider>>
ExternalCommandProvider::Create(absl::string_view command,
                                const std::filesystem::path& work_dir) {
  std::vector<std::string> argv =
      absl::StrSplit(command, absl::ByAnyChar(" \t"), absl::SkipEmpty());
  if (argv.empty()) return ProviderError("empty target command");
  std::error_code ec;
  std::filesystem::create_directories(work_dir, ec);
  if (ec) {
    return ProviderError(absl::StrCat("cannot create work dir ",
                                      work_dir.string(), ": ", ec.message()));
  }
  return std::unique_ptr<ExternalCommandProvider>(new ExternalCommandProvider(
      std::string(command), std::move(argv), work_dir));
}

absl::StatusOr<ExecOutcome> ExternalCommandProvider::Execute(
    ByteSpan payload, uint32_t timeout_ms) {
  if (timeout_ms == 0) return absl::InvalidArgumentError("timeout_ms must be > 0");
  if (absl::Status s = WriteFileBytes(input_path_, payload); !s.ok()) {
    return ProviderError(s.message());
  }
  std::error_code ec;
  std::filesystem::remove(coverage_path_, ec);

  // Everything the child needs is prepared before fork().
  std::vector<std::string> args;
  args.reserve(argv_.size());
  for (const std::string& arg : argv_) {
    args.push_back(absl::StrReplaceAll(arg, {{"@@", input_path_.string()}}));
  }
  std::vector<char*> c_args;
  for (std::string& a : args) c_args.push_back(a.data());
  c_args.push_back(nullptr);
  std::string cov_env = absl::StrCat(kCoverageFileEnv, "=", coverage_path_.string());
  std::vector<char*> c_env;
  for (char** e = environ; *e != nullptr; ++e) {
    if (!absl::StartsWith(*e, absl::StrCat(kCoverageFileEnv, "="))) {
      c_env.push_back(*e);
    }
  }
  c_env.push_back(cov_env.data());
  c_env.push_back(nullptr);
  const std::string input_path = input_path_.string();

  int err_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0) {
    return ProviderError(absl::StrCat("pipe: ", std::strerror(errno)));
  }
  const auto start = Clock::now();
  const pid_t pid = fork();
  if (pid < 0) {
    close(err_pipe[0]);
    close(err_pipe[1]);
    return ProviderError(absl::StrCat("fork: ", std::strerror(errno)));
  }
  if (pid == 0) {
    setpgid(0, 0);
    const int devnull = open("/dev/null", O_RDWR);
    const int in = uses_file_arg_ ? devnull : open(input_path.c_str(), O_RDONLY);
    if (in >= 0) dup2(in, STDIN_FILENO);
    if (devnull >= 0) {
      dup2(devnull, STDOUT_FILENO);
      dup2(devnull, STDERR_FILENO);
    }
    execvpe(c_args[0], c_args.data(), c_env.data());
    const int code = errno;
    (void)!write(err_pipe[1], &code, sizeof(code));
    _exit(127);
  }
  close(err_pipe[1]);
  int exec_errno = 0;
  const ssize_t got = read(err_pipe[0], &exec_errno, sizeof(exec_errno));
  close(err_pipe[0]);
  if (got == sizeof(exec_errno)) {
    waitpid(pid, nullptr, 0);
    return ProviderError(absl::StrCat("cannot execute '", argv_[0],
                                      "': ", std::strerror(exec_errno)));
  }

  ExecOutcome outcome;
  int wstatus = 0;
  const auto deadline = start + std::chrono::milliseconds(timeout_ms);
  auto nap = std::chrono::microseconds(20);
  while (true) {
    const pid_t r = waitpid(pid, &wstatus, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) {
      return ProviderError(absl::StrCat("waitpid: ", std::strerror(errno)));
    }
    if (Clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &wstatus, 0);
      outcome.status = ExecStatus::kTimeout;
      break;
    }
    std::this_thread::sleep_for(nap);
    nap = std::min(nap * 2, std::chrono::microseconds(1000));
  }
  outcome.wall_us = MicrosSince(start);
  if (outcome.status != ExecStatus::kTimeout && WIFSIGNALED(wstatus)) {
    outcome.status = ExecStatus::kCrash;
    outcome.reason = absl::StrCat("signal_", WTERMSIG(wstatus));
  }

  absl::StatusOr<Bytes> dump = ReadFileBytes(coverage_path_);
  if (!dump.ok()) {
    if (outcome.status == ExecStatus::kOk) {
      return ProviderError(absl::StrCat("target exited without writing $",
                                        kCoverageFileEnv, " (",
                                        coverage_path_.string(), ")"));
    }
    return outcome;  // crashed or killed before the dump
  }
  absl::StatusOr<EdgeTrace> trace = ParseCoverageDump(AsString(*dump));
  if (!trace.ok()) {
    if (outcome.status == ExecStatus::kOk) {
      return ProviderError(trace.status().message());
    }
    return outcome;
  }
  outcome.trace = *std::move(trace);
  return outcome;
}

absl::StatusOr<EdgeTrace> ParseCoverageDump(absl::string_view text) {
  EdgeTrace trace;
  bool have_prev = false;
  EdgeId prev = 0;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ' ');
    EdgeId edge;
    uint32_t count;
    if (fields.size() != 2 || !absl::SimpleAtoi(fields[0], &edge) ||
        !absl::SimpleAtoi(fields[1], &count)) {
      return absl::InvalidArgumentError(
          absl::StrCat("coverage dump line ", line_no, ": '", line, "'"));
    }
    if (have_prev && edge <= prev) {
      return absl::InvalidArgumentError(absl::StrCat(
          "coverage dump line ", line_no, ": edge ids not strictly sorted"));
    }
    have_prev = true;
    prev = edge;
    trace.Hit(edge, count);
  }
  return trace;
}

std::string FormatCoverageDump(const EdgeTrace& trace) {
  std::string out;
  for (const auto& [edge, count] : trace.hits()) {
    absl::StrAppend(&out, edge, " ", count, "\n");
  }
  return out;
}

absl::StatusOr<InProcessTarget> LookupTarget(absl::string_view name) {
  if (name == "chunkfmt") return InProcessTarget(chunkfmt::Run);
  if (name == "jsonish") return InProcessTarget(jsonish::Run);
  return absl::InvalidArgumentError(absl::StrCat("unknown target '", name, "'"));
}

absl::StatusOr<std::unique_ptr<CoverageProvider>> MakeProvider(
    absl::string_view target_spec, const std::filesystem::path& work_dir) {
  absl::string_view command = target_spec;
  if (absl::ConsumePrefix(&command, "cmd:")) {
    absl::StatusOr<std::unique_ptr<ExternalCommandProvider>> provider =
        ExternalCommandProvider::Create(command, work_dir);
    if (!provider.ok()) return provider.status();
    return std::unique_ptr<CoverageProvider>(*std::move(provider));
  }
  absl::StatusOr<InProcessTarget> target = LookupTarget(target_spec);
  if (!target.ok()) return target.status();
  return std::unique_ptr<CoverageProvider>(std::make_unique<InProcessProvider>(
      std::string(target_spec), *std::move(target)));
}

std::string DefaultFormatTag(absl::string_view target_spec) {
  if (target_spec == "chunkfmt") return std::string(chunkfmt::kFormatTag);
  if (target_spec == "jsonish") return std::string(jsonish::kFormatTag);
  return "BIN";
}

}  // namespace structfuzz
