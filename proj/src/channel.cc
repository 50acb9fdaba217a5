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

#include "structfuzz/channel.h"

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "structfuzz/hexcodec.h"

namespace structfuzz {
namespace {

bool IsLowerHex(absl::string_view s) {
  if (s.empty() || s.size() % 2 != 0) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

bool ParseId(absl::string_view s, SeedId* id) {
  if (s.empty() || s.size() > 20) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return absl::SimpleAtoi(s, id);
}

}  // namespace

bool IsValidFormatTag(absl::string_view tag) {
  if (tag.empty() || tag.size() > 16) return false;
  for (char c : tag) {
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')) {
      return false;
    }
  }
  return true;
}

std::string FormatRequest(const MutationRequest& req) {
  return absl::StrCat("REQ ", req.seed_id, " ", req.format_tag, " ", req.hex);
}

std::string FormatResponse(const MutationResponse& res) {
  return absl::StrCat("RES ", res.seed_id, " ",
                      res.hex.has_value() ? *res.hex : "VOID");
}

absl::StatusOr<MutationRequest> ParseRequest(absl::string_view line) {
  std::vector<absl::string_view> f = absl::StrSplit(line, ' ');
  MutationRequest req;
  if (f.size() != 4 || f[0] != "REQ") {
    return absl::InvalidArgumentError("not a REQ record");
  }
  if (!ParseId(f[1], &req.seed_id)) {
    return absl::InvalidArgumentError("bad seed id");
  }
  if (!IsValidFormatTag(f[2])) {
    return absl::InvalidArgumentError("bad format tag");
  }
  if (!IsLowerHex(f[3])) return absl::InvalidArgumentError("bad hex payload");
  req.format_tag = std::string(f[2]);
  req.hex = std::string(f[3]);
  return req;
}

absl::StatusOr<MutationResponse> ParseResponse(absl::string_view line) {
  std::vector<absl::string_view> f = absl::StrSplit(line, ' ');
  MutationResponse res;
  if (f.size() != 3 || f[0] != "RES") {
    return absl::InvalidArgumentError("not a RES record");
  }
  if (!ParseId(f[1], &res.seed_id)) {
    return absl::InvalidArgumentError("bad seed id");
  }
  if (f[2] != "VOID") {
    if (!IsLowerHex(f[2])) return absl::InvalidArgumentError("bad hex payload");
    res.hex = std::string(f[2]);
  }
  return res;
}

BoundedQueue::BoundedQueue(size_t capacity)
    : capacity_(capacity == 0 ? 1 : capacity) {}

std::optional<MutationRequest> BoundedQueue::Offer(MutationRequest req) {
  entries_.push_back(std::move(req));
  if (entries_.size() <= capacity_) return std::nullopt;
  MutationRequest evicted = std::move(entries_.front());
  entries_.pop_front();
  return evicted;
}

std::optional<MutationRequest> BoundedQueue::Pop() {
  if (entries_.empty()) return std::nullopt;
  MutationRequest front = std::move(entries_.front());
  entries_.pop_front();
  return front;
}

const MutationRequest* BoundedQueue::Front() const {
  return entries_.empty() ? nullptr : &entries_.front();
}

LlmChannel::LlmChannel(std::unique_ptr<MutatorEndpoint> endpoint,
                       ChannelOptions options)
    : endpoint_(std::move(endpoint)),
      options_(options),
      queue_(options.capacity) {}

std::optional<MutationRequest> LlmChannel::Offer(MutationRequest req) {
  if (last_offered_ == req.seed_id) {
    ++counters_.duplicate_offers;
    return std::nullopt;
  }
  last_offered_ = req.seed_id;
  ++counters_.offers;
  std::optional<MutationRequest> evicted = queue_.Offer(std::move(req));
  if (evicted.has_value()) ++counters_.evictions;
  return evicted;
}

void LlmChannel::TrySend() {
  if (endpoint_ == nullptr) return;
  endpoint_->Poll();
  const bool connected = endpoint_->IsConnected();
  if (was_connected_ && !connected) in_flight_.clear();  // lost with the peer
  was_connected_ = connected;
  if (!connected) return;

  const auto now = std::chrono::steady_clock::now();
  while (!in_flight_.empty() &&
         now - in_flight_.front().second > options_.in_flight_timeout) {
    in_flight_.pop_front();
  }
  if (in_flight_.size() >= options_.max_in_flight) return;
  const MutationRequest* head = queue_.Front();
  if (head == nullptr) return;
  if (!endpoint_->TrySendLine(FormatRequest(*head))) return;
  in_flight_.emplace_back(head->seed_id, now);
  queue_.Pop();
  ++counters_.sent;
}

std::optional<MutationResponse> LlmChannel::TryRecv() {
  if (endpoint_ == nullptr) return std::nullopt;
  std::optional<std::string> line = endpoint_->TryRecvLine();
  if (!line.has_value()) return std::nullopt;

  absl::StatusOr<MutationResponse> res = ParseResponse(*line);
  if (!res.ok()) {
    ++counters_.malformed;
    return std::nullopt;
  }
  bool matched = false;
  for (auto it = in_flight_.begin(); it != in_flight_.end(); ++it) {
    if (it->first == res->seed_id) {
      in_flight_.erase(it);
      matched = true;
      break;
    }
  }
  if (!matched) ++counters_.stale;
  if (res->is_void()) {
    ++counters_.voids;
    return std::nullopt;
  }
  // The server sanitizes its output; check again on this side of the wire.
  std::optional<std::string> clean = SanitizeResponse(*res->hex);
  if (!clean.has_value()) {
    ++counters_.voids;
    return std::nullopt;
  }
  res->hex = *std::move(clean);
  ++counters_.deliveries;
  return *std::move(res);
}

std::optional<MutationResponse> LlmChannel::Pump() {
  TrySend();
  return TryRecv();
}

}  // namespace structfuzz
