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

// Classic byte-level mutators: the deterministic walk, havoc stacking and
// splice. All functions are pure in (inputs, rng state).

#ifndef STRUCTFUZZ_MUTATION_H_
#define STRUCTFUZZ_MUTATION_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "structfuzz/common.h"

namespace structfuzz {

inline constexpr std::array<uint32_t, 14> kInterestingValues = {
    0, 1, 16, 32, 64, 100, 127, 128, 255, 256, 512, 1024, 32767, 65535};
inline constexpr int kArithMax = 35;
inline constexpr size_t kDefaultMaxPayload = size_t{1} << 20;

enum class MutationPhase { kDeterministic, kHavoc, kSplice };

enum class HavocOp {
  kBitFlip,
  kRandomByte,
  kArith,
  kInteresting,
  kDeleteRange,
  kDuplicateRange,
  kCopyWithin,
};
inline constexpr int kNumHavocOps = 7;

struct AppliedOp {
  int op = 0;
  size_t position = 0;
  int64_t argument = 0;
};

struct MutationPlan {
  MutationPhase phase = MutationPhase::kHavoc;
  std::vector<AppliedOp> ops_applied;
};

// Lazily enumerates the deterministic stage of one payload, in this order:
//   1. single-bit flips, bit 0 = MSB of byte 0;
//   2. per byte: +1..+35 then -1..-35, wrapping;
//   3. interesting-value overwrites: 1-byte values that fit in 8 bits at
//      every offset, then every 16-bit value at every offset (big endian,
//      then little endian), then every value as 32 bits likewise.
class DeterministicPass {
 public:
  explicit DeterministicPass(Bytes payload);

  // Writes the next candidate into `out`; false when exhausted.
  bool Next(Bytes& out);

  // Total candidates the pass yields for an n-byte payload.
  static uint64_t YieldCount(size_t n);

  uint64_t produced() const { return produced_; }

 private:
  enum class Stage { kBitFlip, kArith, kInteresting8, kInteresting16,
                     kInteresting32, kDone };

  Bytes payload_;
  Stage stage_ = Stage::kBitFlip;
  size_t pos_ = 0;
  size_t step_ = 0;
  uint64_t produced_ = 0;
};

struct HavocOptions {
  size_t max_len = kDefaultMaxPayload;
  int max_stack_pow2 = 6;  // stack sizes 1, 2, 4, ..., 64
};

// Applies a power-of-two sized stack of random operators. Output length is
// in [1, min(2 * input, max_len)]. `plan` receives the applied operators.
Bytes Havoc(ByteSpan payload, Rng& rng, const HavocOptions& options = {},
            MutationPlan* plan = nullptr);

// Prefix of `a` up to a random split joined with the suffix of `b` from a
// random split. Fails with InvalidArgument when a == b or either is empty.
absl::StatusOr<Bytes> Splice(ByteSpan a, ByteSpan b, Rng& rng);

// Splice with explicit split points; the result may be empty.
Bytes SpliceAt(ByteSpan a, size_t split_a, ByteSpan b, size_t split_b);

}  // namespace structfuzz

#endif  // STRUCTFUZZ_MUTATION_H_
