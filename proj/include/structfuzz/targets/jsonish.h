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

// `jsonish`: recursive-descent parser for a JSON subset (objects, arrays,
// strings with simple escapes, integers). Each grammar production records
// its own edge. Seeded bug: an object key equal to "boom" at nesting depth
// greater than 12.

#ifndef STRUCTFUZZ_TARGETS_JSONISH_H_
#define STRUCTFUZZ_TARGETS_JSONISH_H_

#include "absl/strings/string_view.h"

#include "structfuzz/common.h"
#include "structfuzz/coverage.h"
#include "structfuzz/targets/target.h"

namespace structfuzz::jsonish {

inline constexpr absl::string_view kFormatTag = "JSON";
inline constexpr int kBugDepth = 12;
inline constexpr int kMaxDepth = 64;

enum Edge : EdgeId {
  kEmptyInput = 1,
  kValue,
  kUnexpectedChar,
  kUnexpectedEnd,
  kObjectOpen,
  kObjectEmpty,
  kObjectKey,
  kObjectKeyNotString,
  kObjectMissingColon,
  kObjectMember,
  kObjectComma,
  kObjectUnclosed,
  kObjectClose,
  kArrayOpen,
  kArrayEmpty,
  kArrayElement,
  kArrayComma,
  kArrayUnclosed,
  kArrayClose,
  kString,
  kStringEscape,
  kStringBadEscape,
  kStringUnterminated,
  kStringControlChar,
  kInteger,
  kIntegerNegative,
  kIntegerLeadingZero,
  kIntegerNoDigits,
  kIntegerOverflow,
  kTooDeep,
  kTrailingGarbage,
  kAccepted,
  kBugBoom,
  kDepthBase = 100,  // + min(depth, 16) on every container entry
};

TargetResult Run(ByteSpan input, EdgeTrace& trace);

}  // namespace structfuzz::jsonish

#endif  // STRUCTFUZZ_TARGETS_JSONISH_H_
