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

#include "structfuzz/stub_mutator.h"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_split.h"
#include "structfuzz/channel.h"
#include "structfuzz/hexcodec.h"
#include "structfuzz/targets/chunkfmt.h"

namespace structfuzz {
namespace {

// One rewritable field: 4 bytes at `offset` of chunk `chunk`, or a single
// byte when `width` is 1.
struct Field {
  size_t chunk;
  size_t offset;
  size_t width;
};

void Store(Bytes& payload, const Field& f, uint32_t value) {
  if (f.width == 1) {
    payload[f.offset] = static_cast<uint8_t>(value);
    return;
  }
  for (size_t i = 0; i < 4; ++i) {
    payload[f.offset + i] = static_cast<uint8_t>(value >> (8 * (3 - i)));
  }
}

std::optional<Bytes> MutateChunkfmt(ByteSpan input, uint64_t hash) {
  std::optional<chunkfmt::File> file = chunkfmt::ParseFraming(input);
  if (!file.has_value()) return std::nullopt;

  std::vector<Field> fields;
  for (size_t i = 0; i < file->chunks.size(); ++i) {
    const chunkfmt::Chunk& c = file->chunks[i];
    if (c.type_name() == "HDRX" && c.payload.size() == 8) {
      fields.push_back({i, 0, 4});
      fields.push_back({i, 4, 4});
    } else if (c.type_name() == "GAMA" && c.payload.size() == 4) {
      fields.push_back({i, 0, 4});
    } else if (c.type_name() == "DATA" && !c.payload.empty()) {
      fields.push_back({i, (hash >> 24) % c.payload.size(), 1});
    }
  }
  if (fields.empty()) return std::nullopt;

  const Field& field = fields[hash % fields.size()];
  chunkfmt::Chunk& chunk = file->chunks[field.chunk];
  const Bytes before = chunk.payload;
  const size_t first = (hash >> 8) % kStubBoundaryValues.size();
  for (size_t k = 0; k < kStubBoundaryValues.size(); ++k) {
    Store(chunk.payload, field,
          kStubBoundaryValues[(first + k) % kStubBoundaryValues.size()]);
    if (chunk.payload != before) break;
  }
  chunk.checksum = chunkfmt::Checksum(chunk.payload);
  return chunkfmt::Serialize(*file);
}

}  // namespace

Bytes StubMutate(ByteSpan payload, absl::string_view format_tag) {
  const uint64_t hash = Fnv1a(payload);
  if (format_tag == chunkfmt::kFormatTag) {
    if (std::optional<Bytes> out = MutateChunkfmt(payload, hash)) return *out;
  }
  if (payload.empty()) return Bytes{0xff};
  Bytes out(payload.begin(), payload.end());
  out[hash % out.size()] ^= 0xff;
  return out;
}

std::string HandleRequestLine(absl::string_view line) {
  absl::StatusOr<MutationRequest> req = ParseRequest(line);
  if (!req.ok()) {
    std::vector<absl::string_view> f =
        absl::StrSplit(line, absl::MaxSplits(' ', 2));
    SeedId id;
    if (f.size() >= 2 && f[0] == "REQ" && !f[1].empty() &&
        f[1].find_first_not_of("0123456789") == absl::string_view::npos &&
        absl::SimpleAtoi(f[1], &id)) {
      return FormatResponse({id, std::nullopt});
    }
    return "";
  }
  absl::StatusOr<Bytes> payload = Decode(req->hex);
  if (!payload.ok()) return FormatResponse({req->seed_id, std::nullopt});
  const Bytes mutated = StubMutate(*payload, req->format_tag);
  return FormatResponse({req->seed_id, SanitizeResponse(EncodeHex(mutated))});
}

}  // namespace structfuzz
