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

#include "structfuzz/coverage.h"

#include <bit>
#include <cassert>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace structfuzz {

void EdgeTrace::Hit(EdgeId edge, uint32_t times) {
  if (times == 0) return;
  uint32_t& slot = hits_[edge];
  slot = (slot > std::numeric_limits<uint32_t>::max() - times)
             ? std::numeric_limits<uint32_t>::max()
             : slot + times;
}

EdgeTrace EdgeTrace::FromDense(std::span<const uint32_t> counters) {
  EdgeTrace trace;
  for (size_t i = 0; i < counters.size(); ++i) {
    if (counters[i] != 0) trace.hits_.emplace(static_cast<EdgeId>(i), counters[i]);
  }
  return trace;
}

uint32_t EdgeTrace::count(EdgeId edge) const {
  auto it = hits_.find(edge);
  return it == hits_.end() ? 0 : it->second;
}

int Bucketize(uint32_t count) {
  assert(count >= 1 && "absent edges must not be bucketized");
  if (count <= 3) return static_cast<int>(count) - 1;
  if (count < 8) return 3;
  if (count < 16) return 4;
  if (count < 32) return 5;
  if (count < 128) return 6;
  return 7;
}

NoveltyVerdict CoverageMap::Peek(const EdgeTrace& trace) const {
  NoveltyVerdict verdict;
  for (const auto& [edge, count] : trace.hits()) {
    const uint8_t bit = BucketBit(count);
    const uint8_t before = mask(edge);
    if (before == 0) {
      ++verdict.new_edges;
    } else if ((before & bit) == 0) {
      ++verdict.new_buckets;
    }
  }
  verdict.is_interesting = verdict.new_edges > 0 || verdict.new_buckets > 0;
  return verdict;
}

NoveltyVerdict CoverageMap::Observe(const EdgeTrace& trace) {
  NoveltyVerdict verdict;
  for (const auto& [edge, count] : trace.hits()) {
    const uint8_t bit = BucketBit(count);
    uint8_t& slot = buckets_[edge];
    if (slot == 0) {
      ++verdict.new_edges;
      ++edges_seen_;
    } else if ((slot & bit) == 0) {
      ++verdict.new_buckets;
    }
    slot |= bit;
  }
  verdict.is_interesting = verdict.new_edges > 0 || verdict.new_buckets > 0;
  return verdict;
}

std::vector<EdgeId> CoverageMap::NewEdges(const EdgeTrace& trace) const {
  std::vector<EdgeId> edges;
  for (const auto& [edge, count] : trace.hits()) {
    if (mask(edge) == 0) edges.push_back(edge);
  }
  return edges;
}

uint8_t CoverageMap::mask(EdgeId edge) const {
  auto it = buckets_.find(edge);
  return it == buckets_.end() ? 0 : it->second;
}

}  // namespace structfuzz
