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

#ifndef STRUCTFUZZ_TARGETS_TARGET_H_
#define STRUCTFUZZ_TARGETS_TARGET_H_

#include <functional>
#include <string>

#include "structfuzz/common.h"
#include "structfuzz/coverage.h"

namespace structfuzz {

// What an in-process target reports besides its edges. A crash here stands
// for a seeded bug; the target itself never actually faults.
struct TargetResult {
  bool crashed = false;
  std::string reason;
};

using InProcessTarget = std::function<TargetResult(ByteSpan, EdgeTrace&)>;

}  // namespace structfuzz

#endif  // STRUCTFUZZ_TARGETS_TARGET_H_
