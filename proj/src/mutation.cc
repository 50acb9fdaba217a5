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

#include "structfuzz/mutation.h"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace structfuzz {
namespace {

constexpr size_t kNumInteresting8 = 9;  // values below 256
static_assert(kInterestingValues[kNumInteresting8 - 1] == 255);
static_assert(kInterestingValues[kNumInteresting8] == 256);

void StoreValue(Bytes& buf, size_t pos, uint32_t value, size_t width,
                bool big_endian) {
  for (size_t i = 0; i < width; ++i) {
    const size_t shift = big_endian ? (width - 1 - i) * 8 : i * 8;
    buf[pos + i] = static_cast<uint8_t>(value >> shift);
  }
}

}  // namespace

DeterministicPass::DeterministicPass(Bytes payload)
    : payload_(std::move(payload)) {
  if (payload_.empty()) stage_ = Stage::kDone;
}

uint64_t DeterministicPass::YieldCount(size_t n) {
  if (n == 0) return 0;
  const uint64_t flips = 8 * n;
  const uint64_t arith = 2 * kArithMax * n;
  const uint64_t i8 = kNumInteresting8 * n;
  const uint64_t i16 = n >= 2 ? 2 * kInterestingValues.size() * (n - 1) : 0;
  const uint64_t i32 = n >= 4 ? 2 * kInterestingValues.size() * (n - 3) : 0;
  return flips + arith + i8 + i16 + i32;
}

bool DeterministicPass::Next(Bytes& out) {
  const size_t n = payload_.size();
  while (true) {
    switch (stage_) {
      case Stage::kBitFlip:
        if (pos_ >= 8 * n) {
          stage_ = Stage::kArith;
          pos_ = step_ = 0;
          continue;
        }
        out = payload_;
        out[pos_ / 8] ^= static_cast<uint8_t>(0x80u >> (pos_ % 8));
        ++pos_;
        break;
      case Stage::kArith: {
        if (pos_ >= n) {
          stage_ = Stage::kInteresting8;
          pos_ = step_ = 0;
          continue;
        }
        // step_ 0..34 adds 1..35, 35..69 subtracts 1..35.
        const int delta = step_ < kArithMax ? static_cast<int>(step_) + 1
                                            : -static_cast<int>(step_ - kArithMax + 1);
        out = payload_;
        out[pos_] = static_cast<uint8_t>(out[pos_] + delta);
        if (++step_ == 2 * kArithMax) {
          step_ = 0;
          ++pos_;
        }
        break;
      }
      case Stage::kInteresting8:
        if (pos_ >= n) {
          stage_ = Stage::kInteresting16;
          pos_ = step_ = 0;
          continue;
        }
        out = payload_;
        out[pos_] = static_cast<uint8_t>(kInterestingValues[step_]);
        if (++step_ == kNumInteresting8) {
          step_ = 0;
          ++pos_;
        }
        break;
      case Stage::kInteresting16:
      case Stage::kInteresting32: {
        const size_t width = stage_ == Stage::kInteresting16 ? 2 : 4;
        if (n < width || pos_ > n - width) {
          stage_ = stage_ == Stage::kInteresting16 ? Stage::kInteresting32
                                                   : Stage::kDone;
          pos_ = step_ = 0;
          continue;
        }
        // Even steps are big endian, odd steps little endian.
        out = payload_;
        StoreValue(out, pos_, kInterestingValues[step_ / 2], width,
                   step_ % 2 == 0);
        if (++step_ == 2 * kInterestingValues.size()) {
          step_ = 0;
          ++pos_;
        }
        break;
      }
      case Stage::kDone:
        return false;
    }
    ++produced_;
    return true;
  }
}

Bytes Havoc(ByteSpan payload, Rng& rng, const HavocOptions& options,
            MutationPlan* plan) {
  const size_t cap = std::max<size_t>(
      1, std::min(options.max_len, 2 * std::max<size_t>(payload.size(), 1)));
  Bytes buf(payload.begin(), payload.end());
  if (buf.empty()) buf.push_back(0);
  if (buf.size() > cap) buf.resize(cap);
  if (plan != nullptr) {
    plan->phase = MutationPhase::kHavoc;
    plan->ops_applied.clear();
  }

  const size_t stack = size_t{1} << rng.Below(options.max_stack_pow2 + 1);
  for (size_t i = 0; i < stack; ++i) {
    const auto op = static_cast<HavocOp>(rng.Below(kNumHavocOps));
    AppliedOp applied{static_cast<int>(op), 0, 0};
    switch (op) {
      case HavocOp::kBitFlip: {
        const size_t bit = rng.Below(buf.size() * 8);
        buf[bit / 8] ^= static_cast<uint8_t>(0x80u >> (bit % 8));
        applied.position = bit / 8;
        applied.argument = static_cast<int64_t>(bit % 8);
        break;
      }
      case HavocOp::kRandomByte: {
        const size_t pos = rng.Below(buf.size());
        // XOR with 1..255 so the byte always changes.
        const uint8_t x = static_cast<uint8_t>(1 + rng.Below(255));
        buf[pos] ^= x;
        applied.position = pos;
        applied.argument = x;
        break;
      }
      case HavocOp::kArith: {
        const size_t pos = rng.Below(buf.size());
        const int delta = static_cast<int>(rng.Between(1, kArithMax)) *
                          (rng.OneIn(2) ? 1 : -1);
        buf[pos] = static_cast<uint8_t>(buf[pos] + delta);
        applied.position = pos;
        applied.argument = delta;
        break;
      }
      case HavocOp::kInteresting: {
        size_t width = size_t{1} << rng.Below(3);
        while (width > buf.size()) width /= 2;
        const uint32_t value =
            width == 1 ? kInterestingValues[rng.Below(kNumInteresting8)]
                       : kInterestingValues[rng.Below(kInterestingValues.size())];
        const size_t pos = rng.Below(buf.size() - width + 1);
        StoreValue(buf, pos, value, width, rng.OneIn(2));
        applied.position = pos;
        applied.argument = value;
        break;
      }
      case HavocOp::kDeleteRange: {
        if (buf.size() < 2) break;
        const size_t len = 1 + rng.Below(std::min<size_t>(buf.size() - 1, 32));
        const size_t pos = rng.Below(buf.size() - len + 1);
        buf.erase(buf.begin() + pos, buf.begin() + pos + len);
        applied.position = pos;
        applied.argument = static_cast<int64_t>(len);
        break;
      }
      case HavocOp::kDuplicateRange: {
        if (buf.size() >= cap) break;
        const size_t room = cap - buf.size();
        const size_t len =
            1 + rng.Below(std::min<size_t>({buf.size(), room, 32}));
        const size_t from = rng.Below(buf.size() - len + 1);
        const size_t to = rng.Below(buf.size() + 1);
        Bytes chunk(buf.begin() + from, buf.begin() + from + len);
        buf.insert(buf.begin() + to, chunk.begin(), chunk.end());
        applied.position = to;
        applied.argument = static_cast<int64_t>(len);
        break;
      }
      case HavocOp::kCopyWithin: {
        if (buf.size() < 2) break;
        const size_t len = 1 + rng.Below(std::min<size_t>(buf.size() - 1, 32));
        const size_t from = rng.Below(buf.size() - len + 1);
        const size_t to = rng.Below(buf.size() - len + 1);
        std::memmove(buf.data() + to, buf.data() + from, len);
        applied.position = to;
        applied.argument = static_cast<int64_t>(from);
        break;
      }
    }
    if (plan != nullptr) plan->ops_applied.push_back(applied);
  }
  return buf;
}

Bytes SpliceAt(ByteSpan a, size_t split_a, ByteSpan b, size_t split_b) {
  split_a = std::min(split_a, a.size());
  split_b = std::min(split_b, b.size());
  Bytes out(a.begin(), a.begin() + split_a);
  out.insert(out.end(), b.begin() + split_b, b.end());
  return out;
}

absl::StatusOr<Bytes> Splice(ByteSpan a, ByteSpan b, Rng& rng) {
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError("splice needs two non-empty payloads");
  }
  if (std::equal(a.begin(), a.end(), b.begin(), b.end())) {
    return absl::InvalidArgumentError("splice of identical payloads");
  }
  // Re-roll until non-empty; split_a >= 1 or split_b < |b| guarantees that,
  // so the loop ends quickly.
  while (true) {
    const size_t split_a = rng.Below(a.size() + 1);
    const size_t split_b = rng.Below(b.size() + 1);
    if (split_a == 0 && split_b == b.size()) continue;
    return SpliceAt(a, split_a, b, split_b);
  }
}

}  // namespace structfuzz
