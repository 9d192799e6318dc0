// base.cc

// Copyright 2026  The ovd Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "ovd/base.h"

namespace ovd {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kUnsupportedEncoding: return "unsupported-encoding";
    case ErrorCode::kRateMismatch: return "rate-mismatch";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kDegenerateSource: return "degenerate-source";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kParameter: return "parameter";
    case ErrorCode::kLength: return "length";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kChecksum: return "checksum";
    case ErrorCode::kCompatibility: return "compatibility";
    case ErrorCode::kData: return "data";
  }
  return "unknown";
}

namespace {

// splitmix64 finalizer
uint64_t Mix(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t DeriveSeed(uint64_t root, std::string_view name) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix(Mix(root) ^ h);
}

uint64_t DeriveSeed(uint64_t root, uint64_t index) {
  return Mix(Mix(root) ^ Mix(index + 0x632be59bd9b4e019ULL));
}

}  // namespace ovd
