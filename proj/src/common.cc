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

#include "structfuzz/common.h"

#include "absl/status/status.h"
#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"

namespace structfuzz {
namespace {
constexpr absl::string_view kProviderErrorKey = "structfuzz/provider";
}  // namespace

absl::Status ProviderError(absl::string_view message) {
  absl::Status status(absl::StatusCode::kInternal,
                      absl::StrCat("provider error: ", message));
  status.SetPayload(kProviderErrorKey, absl::Cord("1"));
  return status;
}

bool IsProviderError(const absl::Status& status) {
  return status.GetPayload(kProviderErrorKey).has_value();
}

}  // namespace structfuzz
