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

// Edge-coverage accounting: raw per-execution edge traces, the accumulated
// bucketed map, and the novelty test that decides seed retention.

#ifndef STRUCTFUZZ_COVERAGE_H_
#define STRUCTFUZZ_COVERAGE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "absl/container/flat_hash_map.h"

namespace structfuzz {

using EdgeId = uint32_t;

// Raw hit counts of one execution. Absent edges have zero hits; present
// edges always have a count >= 1.
class EdgeTrace {
 public:
  EdgeTrace() = default;

  void Hit(EdgeId edge, uint32_t times = 1);

  // Converts a dense counter array (index = edge id) into a sparse trace.
  static EdgeTrace FromDense(std::span<const uint32_t> counters);

  uint32_t count(EdgeId edge) const;
  const std::map<EdgeId, uint32_t>& hits() const { return hits_; }
  size_t size() const { return hits_.size(); }
  bool empty() const { return hits_.empty(); }

  bool operator==(const EdgeTrace&) const = default;

 private:
  std::map<EdgeId, uint32_t> hits_;
};

inline constexpr int kNumBuckets = 8;

// Maps a raw hit count (>= 1) to one of 8 power-of-two buckets:
// 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+.
int Bucketize(uint32_t count);

inline uint8_t BucketBit(uint32_t count) {
  return static_cast<uint8_t>(1u << Bucketize(count));
}

struct NoveltyVerdict {
  size_t new_edges = 0;
  size_t new_buckets = 0;
  bool is_interesting = false;

  bool operator==(const NoveltyVerdict&) const = default;
};

// Accumulated coverage: for every edge, the set of buckets ever observed.
class CoverageMap {
 public:
  CoverageMap() = default;

  // ORs the trace into the map and reports what was not there before.
  NoveltyVerdict Observe(const EdgeTrace& trace);

  // Same verdict as Observe() without modifying the map.
  NoveltyVerdict Peek(const EdgeTrace& trace) const;

  // Edges of `trace` that are absent from the map.
  std::vector<EdgeId> NewEdges(const EdgeTrace& trace) const;

  uint8_t mask(EdgeId edge) const;
  size_t edges_seen() const { return edges_seen_; }

 private:
  absl::flat_hash_map<EdgeId, uint8_t> buckets_;
  size_t edges_seen_ = 0;
};

}  // namespace structfuzz

#endif  // STRUCTFUZZ_COVERAGE_H_
