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

// `chunkfmt`: a toy chunked binary format modeled after PNG.
//
//   file   := "FZ01" chunk*
//   chunk  := length:u32be type:4 ascii payload:length bytes checksum:u8
//
// The checksum is the XOR of the payload bytes. HDRX must come first and
// carries width and height (u32be each); GAMA carries a u32be value; DATA is
// free-form; ENDX is empty and terminates the file. Other types are skipped.
//
// Seeded bugs, all behind a valid checksum:
//   B1  width * height > 65536 and a checksum-valid DATA chunk follows.
//   B2  a checksum-valid GAMA chunk with value 0 after a valid HDRX.
//   B3  two checksum-valid DATA chunks with equal checksums, different sizes.

#ifndef STRUCTFUZZ_TARGETS_CHUNKFMT_H_
#define STRUCTFUZZ_TARGETS_CHUNKFMT_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include "absl/strings/string_view.h"
#include <vector>

#include "structfuzz/common.h"
#include "structfuzz/coverage.h"
#include "structfuzz/targets/target.h"

namespace structfuzz::chunkfmt {

inline constexpr absl::string_view kMagic = "FZ01";
inline constexpr absl::string_view kFormatTag = "CHUNKFMT";

// Edge ids. Classified values occupy consecutive ids after their base.
enum Edge : EdgeId {
  kTooShort = 1,
  kMagicBad,
  kMagicOk,
  kEofWithoutEnd,
  kTruncatedHeader,
  kChunkHeader,
  kTruncatedPayload,
  kFirstNotHeader,
  kUnknownChunk,
  kHdr,
  kHdrDuplicate,
  kHdrBadLength,
  kHdrBadChecksum,
  kHdrChecksumOk,
  kHdrZeroDimension,
  kGama,
  kGamaBadLength,
  kGamaBadChecksum,
  kGamaChecksumOk,
  kData,
  kDataBadChecksum,
  kDataChecksumOk,
  kDataByte,
  kEnd,
  kEndBadLength,
  kEndBadChecksum,
  kEndOk,
  kTrailingBytes,
  kBugB1,
  kBugB2,
  kBugB3,
  kWidthClassBase = 100,   // + ValueClass(width), 8 classes
  kHeightClassBase = 110,  // + ValueClass(height)
  kAreaClassBase = 120,    // + AreaClass(width * height), 5 classes
  kGammaClassBase = 130,   // + ValueClass(gamma)
  kDataLenClassBase = 140,  // + LengthClass(len), 5 classes
  kDataByteClassBase = 150,  // + ByteClass(first byte), 4 classes
  kDataCountBase = 160,     // + min(number of valid DATA chunks, 4)
};

// 0, 1, 2..255, 256, 257..65534, 65535, 65536, above.
int ValueClass(uint32_t v);
// 0, 1..1024, 1025..65536, 65537..2^32-1, 2^32 and above.
int AreaClass(uint64_t area);
// 0, 1, 2..15, 16..255, 256+.
int LengthClass(size_t len);
// 0, 1, 255, anything else.
int ByteClass(uint8_t b);

uint8_t Checksum(ByteSpan payload);

struct Chunk {
  std::array<char, 4> type{};
  Bytes payload;
  uint8_t checksum = 0;

  static Chunk Make(absl::string_view type, Bytes payload);
  bool checksum_ok() const { return Checksum(payload) == checksum; }
  absl::string_view type_name() const { return {type.data(), type.size()}; }
};

struct File {
  std::vector<Chunk> chunks;
  Bytes trailing;  // bytes after ENDX
};

Bytes Serialize(const File& file);

// Framing-only parse: magic plus well-formed chunk boundaries. Checksums are
// not verified. Returns nullopt when the framing does not hold.
std::optional<File> ParseFraming(ByteSpan input);

// True when every chunk checksum matches its payload.
bool ChecksumsValid(const File& file);

Bytes U32be(uint32_t v);

// HDRX(width, height) [GAMA(gamma)] DATA(data)... ENDX.
Bytes BuildSeed(uint32_t width, uint32_t height,
                std::optional<uint32_t> gamma,
                const std::vector<Bytes>& data_chunks);

TargetResult Run(ByteSpan input, EdgeTrace& trace);

}  // namespace structfuzz::chunkfmt

#endif  // STRUCTFUZZ_TARGETS_CHUNKFMT_H_
