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

#include "structfuzz/targets/jsonish.h"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>

namespace structfuzz::jsonish {
namespace {

class Parser {
 public:
  Parser(ByteSpan in, EdgeTrace& trace) : in_(in), trace_(trace) {}

  TargetResult Parse() {
    if (in_.empty()) {
      trace_.Hit(kEmptyInput);
      return {};
    }
    const bool ok = Value(0);
    if (crashed_) return {true, "boom"};
    if (!ok) return {};
    SkipSpace();
    if (pos_ != in_.size()) {
      trace_.Hit(kTrailingGarbage);
      return {};
    }
    trace_.Hit(kAccepted);
    return {};
  }

 private:
  void SkipSpace() {
    while (pos_ < in_.size() && (in_[pos_] == ' ' || in_[pos_] == '\n' ||
                                 in_[pos_] == '\t' || in_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool AtEnd() {
    if (pos_ < in_.size()) return false;
    trace_.Hit(kUnexpectedEnd);
    return true;
  }

  bool Value(int depth) {
    SkipSpace();
    if (AtEnd()) return false;
    trace_.Hit(kValue);
    const uint8_t c = in_[pos_];
    if (c == '{') return Object(depth + 1);
    if (c == '[') return Array(depth + 1);
    if (c == '"') {
      std::string ignored;
      return String(ignored);
    }
    if (c == '-' || (c >= '0' && c <= '9')) return Integer();
    trace_.Hit(kUnexpectedChar);
    return false;
  }

  bool Enter(int depth) {
    trace_.Hit(kDepthBase + std::min(depth, 16));
    if (depth > kMaxDepth) {
      trace_.Hit(kTooDeep);
      return false;
    }
    return true;
  }

  bool Object(int depth) {
    trace_.Hit(kObjectOpen);
    if (!Enter(depth)) return false;
    ++pos_;
    SkipSpace();
    if (AtEnd()) return false;
    if (in_[pos_] == '}') {
      trace_.Hit(kObjectEmpty);
      ++pos_;
      return true;
    }
    while (true) {
      SkipSpace();
      if (AtEnd()) return false;
      if (in_[pos_] != '"') {
        trace_.Hit(kObjectKeyNotString);
        return false;
      }
      std::string key;
      if (!String(key)) return false;
      trace_.Hit(kObjectKey);
      if (depth > kBugDepth && key == "boom") {
        trace_.Hit(kBugBoom);
        crashed_ = true;
        return false;
      }
      SkipSpace();
      if (AtEnd()) return false;
      if (in_[pos_] != ':') {
        trace_.Hit(kObjectMissingColon);
        return false;
      }
      ++pos_;
      if (!Value(depth)) return false;
      trace_.Hit(kObjectMember);
      SkipSpace();
      if (AtEnd()) {
        trace_.Hit(kObjectUnclosed);
        return false;
      }
      if (in_[pos_] == ',') {
        trace_.Hit(kObjectComma);
        ++pos_;
        continue;
      }
      if (in_[pos_] == '}') {
        trace_.Hit(kObjectClose);
        ++pos_;
        return true;
      }
      trace_.Hit(kObjectUnclosed);
      return false;
    }
  }

  bool Array(int depth) {
    trace_.Hit(kArrayOpen);
    if (!Enter(depth)) return false;
    ++pos_;
    SkipSpace();
    if (AtEnd()) return false;
    if (in_[pos_] == ']') {
      trace_.Hit(kArrayEmpty);
      ++pos_;
      return true;
    }
    while (true) {
      if (!Value(depth)) return false;
      trace_.Hit(kArrayElement);
      SkipSpace();
      if (AtEnd()) {
        trace_.Hit(kArrayUnclosed);
        return false;
      }
      if (in_[pos_] == ',') {
        trace_.Hit(kArrayComma);
        ++pos_;
        continue;
      }
      if (in_[pos_] == ']') {
        trace_.Hit(kArrayClose);
        ++pos_;
        return true;
      }
      trace_.Hit(kArrayUnclosed);
      return false;
    }
  }

  bool String(std::string& out) {
    trace_.Hit(kString);
    ++pos_;  // opening quote
    while (true) {
      if (pos_ >= in_.size()) {
        trace_.Hit(kStringUnterminated);
        return false;
      }
      const uint8_t c = in_[pos_++];
      if (c == '"') return true;
      if (c < 0x20) {
        trace_.Hit(kStringControlChar);
        return false;
      }
      if (c == '\\') {
        trace_.Hit(kStringEscape);
        if (pos_ >= in_.size()) {
          trace_.Hit(kStringUnterminated);
          return false;
        }
        const uint8_t e = in_[pos_++];
        switch (e) {
          case '"':
          case '\\':
          case '/':
            out.push_back(static_cast<char>(e));
            break;
          case 'n':
            out.push_back('\n');
            break;
          case 't':
            out.push_back('\t');
            break;
          default:
            trace_.Hit(kStringBadEscape);
            return false;
        }
        continue;
      }
      out.push_back(static_cast<char>(c));
    }
  }

  bool Integer() {
    trace_.Hit(kInteger);
    if (in_[pos_] == '-') {
      trace_.Hit(kIntegerNegative);
      ++pos_;
    }
    const size_t start = pos_;
    while (pos_ < in_.size() && in_[pos_] >= '0' && in_[pos_] <= '9') ++pos_;
    const size_t digits = pos_ - start;
    if (digits == 0) {
      trace_.Hit(kIntegerNoDigits);
      return false;
    }
    if (digits > 1 && in_[start] == '0') {
      trace_.Hit(kIntegerLeadingZero);
      return false;
    }
    if (digits > 18) trace_.Hit(kIntegerOverflow);
    return true;
  }

  ByteSpan in_;
  EdgeTrace& trace_;
  size_t pos_ = 0;
  bool crashed_ = false;
};

}  // namespace

TargetResult Run(ByteSpan input, EdgeTrace& trace) {
  return Parser(input, trace).Parse();
}

}  // namespace structfuzz::jsonish
