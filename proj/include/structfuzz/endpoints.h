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

// MutatorEndpoint implementations: a non-blocking stream-socket client and an
// in-process adapter that serves requests on a worker thread.

#ifndef STRUCTFUZZ_ENDPOINTS_H_
#define STRUCTFUZZ_ENDPOINTS_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <thread>

#include "absl/status/statusor.h"
#include "structfuzz/channel.h"

namespace structfuzz {

inline constexpr std::chrono::milliseconds kInitialBackoff{50};
inline constexpr std::chrono::milliseconds kMaxBackoff{5000};

// "unix:<path>" or "<ipv4|localhost>:<port>".
struct EndpointAddress {
  bool is_unix = false;
  std::string path;
  std::string host;
  uint16_t port = 0;
};
absl::StatusOr<EndpointAddress> ParseEndpointAddress(absl::string_view address);

class SocketEndpoint : public MutatorEndpoint {
 public:
  explicit SocketEndpoint(EndpointAddress address);
  ~SocketEndpoint() override;
  SocketEndpoint(const SocketEndpoint&) = delete;
  SocketEndpoint& operator=(const SocketEndpoint&) = delete;

  void Poll() override;
  bool TrySendLine(absl::string_view line) override;
  std::optional<std::string> TryRecvLine() override;
  bool IsConnected() const override { return state_ == State::kReady; }

  uint64_t connect_attempts() const { return connect_attempts_; }
  std::chrono::milliseconds current_backoff() const { return backoff_; }

 private:
  enum class State { kIdle, kConnecting, kAwaitGreeting, kReady };

  void StartConnect();
  void Disconnect();
  void ReadAvailable();
  void FlushOutput();

  EndpointAddress address_;
  State state_ = State::kIdle;
  int fd_ = -1;
  std::string in_buf_;
  std::string out_buf_;
  std::chrono::steady_clock::time_point next_attempt_{};
  std::chrono::milliseconds backoff_ = kInitialBackoff;
  uint64_t connect_attempts_ = 0;
};

// Runs `handler` on a worker thread for each request line. Lines move
// between the loop and the worker through mutex-guarded mailboxes that the
// loop side only ever try-locks. `latency` delays each reply to model a
// slow generator.
class InProcessEndpoint : public MutatorEndpoint {
 public:
  using Handler = std::function<std::string(absl::string_view)>;

  explicit InProcessEndpoint(Handler handler,
                             std::chrono::microseconds latency = {});
  ~InProcessEndpoint() override;
  InProcessEndpoint(const InProcessEndpoint&) = delete;
  InProcessEndpoint& operator=(const InProcessEndpoint&) = delete;

  void Poll() override;
  bool TrySendLine(absl::string_view line) override;
  std::optional<std::string> TryRecvLine() override;
  bool IsConnected() const override { return greeted_; }

 private:
  void Serve();

  Handler handler_;
  std::chrono::microseconds latency_;
  std::mutex mu_;
  std::condition_variable wake_;
  std::deque<std::string> inbox_;   // guarded by mu_
  std::deque<std::string> outbox_;  // guarded by mu_
  bool stop_ = false;               // guarded by mu_
  bool greeted_ = false;
  std::thread worker_;
};

// "inproc:stub" selects the in-process stub; anything else is a socket
// address.
absl::StatusOr<std::unique_ptr<MutatorEndpoint>> MakeEndpoint(
    absl::string_view address);

}  // namespace structfuzz

#endif  // STRUCTFUZZ_ENDPOINTS_H_
