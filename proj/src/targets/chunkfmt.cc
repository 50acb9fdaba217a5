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

#include "structfuzz/targets/chunkfmt.h"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include "absl/strings/string_view.h"
#include <utility>
#include <vector>

namespace structfuzz::chunkfmt {
namespace {

uint32_t ReadU32be(ByteSpan b) {
  return (uint32_t{b[0]} << 24) | (uint32_t{b[1]} << 16) |
         (uint32_t{b[2]} << 8) | uint32_t{b[3]};
}

bool TypeIs(ByteSpan type, absl::string_view name) {
  return std::equal(type.begin(), type.end(), name.begin(), name.end());
}

}  // namespace

int ValueClass(uint32_t v) {
  if (v == 0) return 0;
  if (v == 1) return 1;
  if (v < 256) return 2;
  if (v == 256) return 3;
  if (v < 65535) return 4;
  if (v == 65535) return 5;
  if (v == 65536) return 6;
  return 7;
}

int AreaClass(uint64_t area) {
  if (area == 0) return 0;
  if (area <= 1024) return 1;
  if (area <= 65536) return 2;
  if (area < (uint64_t{1} << 32)) return 3;
  return 4;
}

int LengthClass(size_t len) {
  if (len == 0) return 0;
  if (len == 1) return 1;
  if (len < 16) return 2;
  if (len < 256) return 3;
  return 4;
}

int ByteClass(uint8_t b) {
  if (b == 0) return 0;
  if (b == 1) return 1;
  if (b == 255) return 2;
  return 3;
}

uint8_t Checksum(ByteSpan payload) {
  uint8_t x = 0;
  for (uint8_t b : payload) x ^= b;
  return x;
}

Chunk Chunk::Make(absl::string_view type, Bytes payload) {
  Chunk chunk;
  std::copy_n(type.begin(), std::min<size_t>(4, type.size()),
              chunk.type.begin());
  chunk.checksum = Checksum(payload);
  chunk.payload = std::move(payload);
  return chunk;
}

Bytes U32be(uint32_t v) {
  return {static_cast<uint8_t>(v >> 24), static_cast<uint8_t>(v >> 16),
          static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v)};
}

Bytes Serialize(const File& file) {
  Bytes out(kMagic.begin(), kMagic.end());
  for (const Chunk& chunk : file.chunks) {
    const Bytes len = U32be(static_cast<uint32_t>(chunk.payload.size()));
    out.insert(out.end(), len.begin(), len.end());
    out.insert(out.end(), chunk.type.begin(), chunk.type.end());
    out.insert(out.end(), chunk.payload.begin(), chunk.payload.end());
    out.push_back(chunk.checksum);
  }
  out.insert(out.end(), file.trailing.begin(), file.trailing.end());
  return out;
}

std::optional<File> ParseFraming(ByteSpan input) {
  if (input.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), input.begin())) {
    return std::nullopt;
  }
  File file;
  size_t pos = kMagic.size();
  while (pos < input.size()) {
    if (input.size() - pos < 8) return std::nullopt;
    const uint32_t len = ReadU32be(input.subspan(pos, 4));
    if (len > input.size() - pos - 8 || input.size() - pos - 8 - len < 1) {
      return std::nullopt;
    }
    Chunk chunk;
    std::copy_n(input.begin() + pos + 4, 4, chunk.type.begin());
    const ByteSpan payload = input.subspan(pos + 8, len);
    chunk.payload.assign(payload.begin(), payload.end());
    chunk.checksum = input[pos + 8 + len];
    pos += 8 + len + 1;
    const bool end = chunk.type_name() == "ENDX";
    file.chunks.push_back(std::move(chunk));
    if (end) {
      file.trailing.assign(input.begin() + pos, input.end());
      break;
    }
  }
  return file;
}

bool ChecksumsValid(const File& file) {
  return std::all_of(file.chunks.begin(), file.chunks.end(),
                     [](const Chunk& c) { return c.checksum_ok(); });
}

Bytes BuildSeed(uint32_t width, uint32_t height,
                std::optional<uint32_t> gamma,
                const std::vector<Bytes>& data_chunks) {
  File file;
  Bytes hdr = U32be(width);
  const Bytes h = U32be(height);
  hdr.insert(hdr.end(), h.begin(), h.end());
  file.chunks.push_back(Chunk::Make("HDRX", std::move(hdr)));
  if (gamma.has_value()) {
    file.chunks.push_back(Chunk::Make("GAMA", U32be(*gamma)));
  }
  for (const Bytes& data : data_chunks) {
    file.chunks.push_back(Chunk::Make("DATA", data));
  }
  file.chunks.push_back(Chunk::Make("ENDX", {}));
  return Serialize(file);
}

TargetResult Run(ByteSpan input, EdgeTrace& trace) {
  if (input.size() < kMagic.size()) {
    trace.Hit(kTooShort);
    return {};
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), input.begin())) {
    trace.Hit(kMagicBad);
    return {};
  }
  trace.Hit(kMagicOk);

  bool first = true;
  bool have_hdr = false;
  uint64_t area = 0;
  int valid_data = 0;
  std::vector<std::pair<uint8_t, size_t>> data_sums;  // (checksum, length)

  size_t pos = kMagic.size();
  while (true) {
    if (pos == input.size()) {
      trace.Hit(kEofWithoutEnd);
      break;
    }
    if (input.size() - pos < 8) {
      trace.Hit(kTruncatedHeader);
      break;
    }
    const uint32_t len = ReadU32be(input.subspan(pos, 4));
    const ByteSpan type = input.subspan(pos + 4, 4);
    trace.Hit(kChunkHeader);
    if (len > input.size() - pos - 8 || input.size() - pos - 8 - len < 1) {
      trace.Hit(kTruncatedPayload);
      break;
    }
    const ByteSpan payload = input.subspan(pos + 8, len);
    const bool checksum_ok = Checksum(payload) == input[pos + 8 + len];
    pos += 8 + len + 1;

    if (first && !TypeIs(type, "HDRX")) {
      trace.Hit(kFirstNotHeader);
      break;
    }
    first = false;

    if (TypeIs(type, "HDRX")) {
      trace.Hit(kHdr);
      if (have_hdr) {
        trace.Hit(kHdrDuplicate);
        continue;
      }
      if (len != 8) {
        trace.Hit(kHdrBadLength);
        break;
      }
      if (!checksum_ok) {
        trace.Hit(kHdrBadChecksum);
        break;
      }
      trace.Hit(kHdrChecksumOk);
      const uint32_t width = ReadU32be(payload.subspan(0, 4));
      const uint32_t height = ReadU32be(payload.subspan(4, 4));
      trace.Hit(kWidthClassBase + ValueClass(width));
      trace.Hit(kHeightClassBase + ValueClass(height));
      if (width == 0 || height == 0) trace.Hit(kHdrZeroDimension);
      area = uint64_t{width} * height;
      trace.Hit(kAreaClassBase + AreaClass(area));
      have_hdr = true;
    } else if (TypeIs(type, "GAMA")) {
      trace.Hit(kGama);
      if (len != 4) {
        trace.Hit(kGamaBadLength);
        continue;
      }
      if (!checksum_ok) {
        trace.Hit(kGamaBadChecksum);
        continue;
      }
      trace.Hit(kGamaChecksumOk);
      const uint32_t gamma = ReadU32be(payload);
      trace.Hit(kGammaClassBase + ValueClass(gamma));
      if (have_hdr && gamma == 0) {
        trace.Hit(kBugB2);
        return {true, "B2"};
      }
    } else if (TypeIs(type, "DATA")) {
      trace.Hit(kData);
      if (!checksum_ok) {
        trace.Hit(kDataBadChecksum);
        continue;
      }
      trace.Hit(kDataChecksumOk);
      trace.Hit(kDataLenClassBase + LengthClass(len));
      if (len > 0) {
        trace.Hit(kDataByteClassBase + ByteClass(payload[0]));
        trace.Hit(kDataByte, len);
      }
      ++valid_data;
      if (have_hdr && area > 65536) {
        trace.Hit(kBugB1);
        return {true, "B1"};
      }
      const uint8_t sum = Checksum(payload);
      for (const auto& [prev_sum, prev_len] : data_sums) {
        if (prev_sum == sum && prev_len != len) {
          trace.Hit(kBugB3);
          return {true, "B3"};
        }
      }
      data_sums.emplace_back(sum, len);
    } else if (TypeIs(type, "ENDX")) {
      trace.Hit(kEnd);
      if (len != 0) {
        trace.Hit(kEndBadLength);
      } else if (!checksum_ok) {
        trace.Hit(kEndBadChecksum);
      } else {
        trace.Hit(kEndOk);
      }
      if (pos != input.size()) trace.Hit(kTrailingBytes);
      break;
    } else {
      trace.Hit(kUnknownChunk);
    }
  }
  trace.Hit(kDataCountBase + std::min(valid_data, 4));
  return {};
}

}  // namespace structfuzz::chunkfmt
