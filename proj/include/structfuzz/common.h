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

#ifndef STRUCTFUZZ_COMMON_H_
#define STRUCTFUZZ_COMMON_H_

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/string_view.h"

namespace structfuzz {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;
using SeedId = uint64_t;

inline Bytes ToBytes(absl::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string AsString(ByteSpan b) { return std::string(b.begin(), b.end()); }

// Deterministic random source. std::mt19937_64 is bit-specified by the
// standard; the bounded draws below avoid the implementation-defined
// std::*_distribution classes so campaigns replay across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform in [0, n). n must be > 0.
  uint64_t Below(uint64_t n) {
    // Multiply-shift; bias is < n / 2^64, irrelevant for mutation.
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Uniform in [lo, hi].
  uint64_t Between(uint64_t lo, uint64_t hi) { return lo + Below(hi - lo + 1); }

  bool OneIn(uint64_t n) { return Below(n) == 0; }

  // Uniform in [0, 1).
  double Unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// 64-bit FNV-1a; stable across processes, unlike absl::Hash.
inline uint64_t Fnv1a(ByteSpan data, uint64_t hash = 0xcbf29ce484222325ULL) {
  for (uint8_t b : data) {
    hash ^= b;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

// Errors raised by coverage providers. The engine treats these as fatal for
// the campaign; the CLI maps them to exit code 3.
absl::Status ProviderError(absl::string_view message);
bool IsProviderError(const absl::Status& status);

}  // namespace structfuzz

#endif  // STRUCTFUZZ_COMMON_H_
