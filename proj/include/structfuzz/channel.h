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

// The asynchronous boundary between the fuzzing loop and an out-of-process
// mutator. The loop offers seeds into a bounded drop-oldest queue and pumps
// the transport once per iteration; no call on this surface ever waits.
//
// Wire protocol, newline-delimited UTF-8, single spaces between fields:
//   server greeting   HELLO structfuzz-mutator 1
//   request           REQ <seed_id> <format_tag> <hex>
//   response          RES <seed_id> <hex>   |   RES <seed_id> VOID
// Hex is lowercase; format_tag matches [A-Z0-9_]{1,16}.

#ifndef STRUCTFUZZ_CHANNEL_H_
#define STRUCTFUZZ_CHANNEL_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/statusor.h"
#include "structfuzz/common.h"

namespace structfuzz {

inline constexpr size_t kDefaultQueueCapacity = 30;
inline constexpr absl::string_view kGreeting = "HELLO structfuzz-mutator 1";

struct MutationRequest {
  SeedId seed_id = 0;
  std::string format_tag;
  std::string hex;
  double timestamp = 0;  // campaign-relative seconds

  bool operator==(const MutationRequest&) const = default;
};

struct MutationResponse {
  SeedId seed_id = 0;
  std::optional<std::string> hex;  // nullopt = VOID

  bool is_void() const { return !hex.has_value(); }
  bool operator==(const MutationResponse&) const = default;
};

bool IsValidFormatTag(absl::string_view tag);

std::string FormatRequest(const MutationRequest& req);
std::string FormatResponse(const MutationResponse& res);
// Parsers take one line without its trailing newline.
absl::StatusOr<MutationRequest> ParseRequest(absl::string_view line);
absl::StatusOr<MutationResponse> ParseResponse(absl::string_view line);

// FIFO with a fixed capacity that evicts its oldest entry on overflow.
class BoundedQueue {
 public:
  explicit BoundedQueue(size_t capacity = kDefaultQueueCapacity);

  // Never blocks. Returns the evicted oldest entry when over capacity.
  std::optional<MutationRequest> Offer(MutationRequest req);
  std::optional<MutationRequest> Pop();
  const MutationRequest* Front() const;

  size_t size() const { return entries_.size(); }
  size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const std::deque<MutationRequest>& entries() const { return entries_; }

 private:
  size_t capacity_;
  std::deque<MutationRequest> entries_;
};

// A line-oriented, non-blocking transport to a mutator. Implementations
// handle their own connection management; every method returns
// immediately.
class MutatorEndpoint {
 public:
  virtual ~MutatorEndpoint() = default;

  // Advances connection state (connect, greeting, reconnect backoff, I/O).
  virtual void Poll() = 0;
  // Hands one line (no trailing newline) to the transport if it can take it
  // now. False leaves nothing queued.
  virtual bool TrySendLine(absl::string_view line) = 0;
  // One complete line if buffered, without its newline.
  virtual std::optional<std::string> TryRecvLine() = 0;
  // True once the peer's greeting has been verified.
  virtual bool IsConnected() const = 0;
};

struct ChannelCounters {
  uint64_t offers = 0;
  uint64_t duplicate_offers = 0;
  uint64_t evictions = 0;
  uint64_t sent = 0;
  uint64_t deliveries = 0;
  uint64_t voids = 0;
  uint64_t malformed = 0;
  uint64_t stale = 0;
};

struct ChannelOptions {
  size_t capacity = kDefaultQueueCapacity;
  // Requests handed to the endpoint and not yet answered. The mutator
  // serves one request at a time, so more would only queue up remotely
  // where the recency policy cannot reach them.
  size_t max_in_flight = 1;
  std::chrono::milliseconds in_flight_timeout{30000};
};

class LlmChannel {
 public:
  LlmChannel(std::unique_ptr<MutatorEndpoint> endpoint,
             ChannelOptions options = {});

  // Enqueues `req`; a request for the same seed as the previous offer is
  // dropped as a duplicate. Returns the evicted request, if any.
  std::optional<MutationRequest> Offer(MutationRequest req);

  // Sends the head of the queue if the endpoint takes it right now.
  void TrySend();

  // At most one decoded response. VOID and malformed replies are counted
  // and swallowed.
  std::optional<MutationResponse> TryRecv();

  // TrySend() then TryRecv(); the once-per-iteration entry point.
  std::optional<MutationResponse> Pump();

  const BoundedQueue& queue() const { return queue_; }
  const ChannelCounters& counters() const { return counters_; }
  bool connected() const { return endpoint_ != nullptr && endpoint_->IsConnected(); }

 private:
  std::unique_ptr<MutatorEndpoint> endpoint_;
  ChannelOptions options_;
  BoundedQueue queue_;
  ChannelCounters counters_;
  std::optional<SeedId> last_offered_;
  std::deque<std::pair<SeedId, std::chrono::steady_clock::time_point>> in_flight_;
  bool was_connected_ = false;
};

}  // namespace structfuzz

#endif  // STRUCTFUZZ_CHANNEL_H_
