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

// Deterministic structure-aware mutator: the in-process twin of the
// out-of-process stub backend. For chunkfmt input it rewrites one field
// with a boundary value and recomputes that chunk's checksum, so the output
// stays well-formed; anything else gets a single byte inverted.

#ifndef STRUCTFUZZ_STUB_MUTATOR_H_
#define STRUCTFUZZ_STUB_MUTATOR_H_

#include <array>
#include <cstdint>
#include <string>
#include "absl/strings/string_view.h"

#include "structfuzz/common.h"

namespace structfuzz {

inline constexpr std::array<uint32_t, 6> kStubBoundaryValues = {
    0, 1, 255, 256, 65535, 65536};

Bytes StubMutate(ByteSpan payload, absl::string_view format_tag);

// Server-side handling of one request line: REQ in, RES out. Malformed
// requests with a parseable id get VOID; anything else yields "" (ignored).
std::string HandleRequestLine(absl::string_view line);

}  // namespace structfuzz

#endif  // STRUCTFUZZ_STUB_MUTATOR_H_
