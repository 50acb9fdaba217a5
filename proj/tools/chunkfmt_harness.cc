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

// Standalone chunkfmt target for the external command provider. Reads the
// input from argv[1] (or stdin), writes the edge trace to $SF_COV_FILE and
// aborts when a seeded bug fires.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include "structfuzz/common.h"
#include "structfuzz/coverage.h"
#include "structfuzz/executor.h"
#include "structfuzz/targets/chunkfmt.h"

int main(int argc, char** argv) {
  std::string data;
  if (argc > 1) {
    std::ifstream in(argv[1], std::ios::binary);
    if (!in) {
      std::cerr << "chunkfmt_harness: cannot open " << argv[1] << "\n";
      return 1;
    }
    data.assign(std::istreambuf_iterator<char>(in), {});
  } else {
    data.assign(std::istreambuf_iterator<char>(std::cin), {});
  }
  structfuzz::EdgeTrace trace;
  const structfuzz::Bytes input = structfuzz::ToBytes(data);
  const structfuzz::TargetResult result = structfuzz::chunkfmt::Run(input, trace);

  if (const char* path = std::getenv(
          std::string(structfuzz::kCoverageFileEnv).c_str())) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << structfuzz::FormatCoverageDump(trace);
  }
  if (result.crashed) {
    std::fprintf(stderr, "chunkfmt_harness: %s\n", result.reason.c_str());
    std::abort();
  }
  return 0;
}
