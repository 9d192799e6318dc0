// features/feature_io.cc

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

#include <bit>
#include <cstring>
#include <fstream>

#include "ovd/features.h"
#include "ovd/pyknogram.h"

namespace ovd {

int FeatureDim(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMagSpec: return 257;
    case FeatureKind::kMfb: return 40;
    case FeatureKind::kMfcc: return 39;
    case FeatureKind::kPykno: return 120;
  }
  throw Error(ErrorCode::kParameter, "unknown feature kind");
}

std::string_view FeatureName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMagSpec: return "magspec";
    case FeatureKind::kMfb: return "mfb";
    case FeatureKind::kMfcc: return "mfcc";
    case FeatureKind::kPykno: return "pykno";
  }
  return "unknown";
}

std::optional<FeatureKind> ParseFeatureKind(std::string_view name) {
  for (auto k : {FeatureKind::kMagSpec, FeatureKind::kMfb, FeatureKind::kMfcc,
                 FeatureKind::kPykno})
    if (FeatureName(k) == name) return k;
  return std::nullopt;
}

FeatureMatrix::FeatureMatrix(FeatureKind k, Matrix m)
    : kind(k), data(std::move(m)) {
  if (data.cols() != FeatureDim(kind))
    throw Error(ErrorCode::kShape,
                std::string(FeatureName(kind)) + " needs dim " +
                    std::to_string(FeatureDim(kind)) + ", got " +
                    std::to_string(data.cols()));
}

FeatureMatrix ExtractFeatures(FeatureKind kind, const AudioClip &clip,
                              const FrameGrid &grid) {
  switch (kind) {
    case FeatureKind::kMagSpec: return ExtractMagSpec(clip, grid);
    case FeatureKind::kMfb: return ExtractMfb(clip, grid);
    case FeatureKind::kMfcc: return ExtractMfcc(clip, grid);
    case FeatureKind::kPykno:
      return Pyknogram(clip, DefaultGammatoneBank(), grid);
  }
  throw Error(ErrorCode::kParameter, "unknown feature kind");
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "feature files are written with native little-endian floats");

template <typename T>
void Put(std::string *out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out->append(buf, sizeof(T));
}

template <typename T>
T Get(const std::string &in, std::size_t offset) {
  T v;
  std::memcpy(&v, in.data() + offset, sizeof(T));
  return v;
}

}  // namespace

void WriteFeatures(const FeatureMatrix &fm, const std::filesystem::path &path) {
  std::string buf = "FTR1";
  buf.push_back(static_cast<char>(fm.kind));
  Put<uint32_t>(&buf, static_cast<uint32_t>(fm.dim()));
  Put<uint32_t>(&buf, static_cast<uint32_t>(fm.frames()));
  buf.reserve(buf.size() + fm.data.size() * 4);
  for (Eigen::Index r = 0; r < fm.frames(); ++r)
    for (Eigen::Index c = 0; c < fm.dim(); ++c)
      Put<float>(&buf, static_cast<float>(fm.data(r, c)));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

FeatureMatrix ReadFeatures(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(is)),
                        std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 13;
  if (buf.size() < kHeader || buf.compare(0, 4, "FTR1") != 0)
    throw Error(ErrorCode::kFormat, path.string() + ": not an FTR1 file");
  const auto code = static_cast<uint8_t>(buf[4]);
  if (code > 3) throw Error(ErrorCode::kFormat, "unknown feature kind code");
  const auto kind = static_cast<FeatureKind>(code);
  const uint32_t dim = Get<uint32_t>(buf, 5);
  const uint32_t frames = Get<uint32_t>(buf, 9);
  if (dim != static_cast<uint32_t>(FeatureDim(kind)))
    throw Error(ErrorCode::kFormat, "dim does not match feature kind");
  if (buf.size() != kHeader + std::size_t(dim) * frames * 4)
    throw Error(ErrorCode::kFormat, path.string() + ": size mismatch");
  Matrix data(frames, dim);
  std::size_t off = kHeader;
  for (uint32_t r = 0; r < frames; ++r)
    for (uint32_t c = 0; c < dim; ++c, off += 4)
      data(r, c) = Get<float>(buf, off);
  return FeatureMatrix(kind, std::move(data));
}

}  // namespace ovd
