// audio_io.cc

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

#include "ovd/audio_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ovd {

std::size_t FrameGrid::NumFrames(std::size_t num_samples) const {
  const auto len = static_cast<std::size_t>(frame_len);
  if (num_samples < len) return 0;
  return (num_samples - len) / static_cast<std::size_t>(hop) + 1;
}

void FrameGrid::Check() const {
  if (frame_len <= 0 || hop <= 0 || hop > frame_len)
    throw Error(ErrorCode::kParameter,
                "invalid frame grid: frame_len=" + std::to_string(frame_len) +
                    " hop=" + std::to_string(hop));
}

namespace {

uint32_t ReadU32(const char *p) {
  const auto *u = reinterpret_cast<const unsigned char *>(p);
  return uint32_t(u[0]) | uint32_t(u[1]) << 8 | uint32_t(u[2]) << 16 |
         uint32_t(u[3]) << 24;
}

uint16_t ReadU16(const char *p) {
  const auto *u = reinterpret_cast<const unsigned char *>(p);
  return uint16_t(u[0] | u[1] << 8);
}

void PutU32(std::string *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(char((v >> (8 * i)) & 0xff));
}

void PutU16(std::string *out, uint16_t v) {
  out->push_back(char(v & 0xff));
  out->push_back(char(v >> 8));
}

bool ReadExact(std::istream &is, char *buf, std::size_t n) {
  is.read(buf, static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(is.gcount()) == n;
}

}  // namespace

AudioClip ReadWav(std::istream &is) {
  char riff[12];
  if (!ReadExact(is, riff, 12) || std::memcmp(riff, "RIFF", 4) != 0 ||
      std::memcmp(riff + 8, "WAVE", 4) != 0)
    throw Error(ErrorCode::kFormat, "not a RIFF/WAVE stream");

  bool have_fmt = false;
  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0;
  while (true) {
    char hdr[8];
    if (!ReadExact(is, hdr, 8))
      throw Error(ErrorCode::kFormat, "missing data chunk");
    const uint32_t size = ReadU32(hdr + 4);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16) throw Error(ErrorCode::kFormat, "short fmt chunk");
      std::string fmt(size, '\0');
      if (!ReadExact(is, fmt.data(), size))
        throw Error(ErrorCode::kFormat, "truncated fmt chunk");
      if (size & 1) is.ignore(1);
      const uint16_t tag = ReadU16(fmt.data());
      channels = ReadU16(fmt.data() + 2);
      rate = ReadU32(fmt.data() + 4);
      bits = ReadU16(fmt.data() + 14);
      if (tag != 1)
        throw Error(ErrorCode::kUnsupportedEncoding,
                    "WAV format tag " + std::to_string(tag) + " is not PCM");
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorCode::kFormat, "data before fmt chunk");
      if (channels != 1 || bits != 16)
        throw Error(ErrorCode::kUnsupportedEncoding,
                    "need 16-bit mono PCM, got " + std::to_string(channels) +
                        " channel(s) at " + std::to_string(bits) + " bits");
      if (rate != static_cast<uint32_t>(kSampleRate))
        throw Error(ErrorCode::kRateMismatch,
                    "sample rate " + std::to_string(rate) + " Hz, expected " +
                        std::to_string(kSampleRate));
      if (size % 2 != 0) throw Error(ErrorCode::kFormat, "odd data size");
      std::string data(size, '\0');
      if (!ReadExact(is, data.data(), size))
        throw Error(ErrorCode::kFormat, "truncated data chunk");
      AudioClip clip;
      clip.sample_rate_hz = static_cast<int>(rate);
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        const auto v = static_cast<int16_t>(ReadU16(data.data() + 2 * i));
        clip.samples[i] = v / 32768.0;
      }
      return clip;
    } else {
      is.ignore(static_cast<std::streamsize>(size + (size & 1)));
      if (!is) throw Error(ErrorCode::kFormat, "truncated chunk");
    }
  }
}

AudioClip ReadWav(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return ReadWav(is);
  } catch (const Error &e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void WriteWav(const AudioClip &clip, const std::filesystem::path &path) {
  for (double s : clip.samples)
    if (!std::isfinite(s))
      throw Error(ErrorCode::kPrecondition, "non-finite sample in clip");
  const auto data_bytes = static_cast<uint32_t>(clip.samples.size() * 2);
  std::string buf;
  buf.reserve(44 + data_bytes);
  buf += "RIFF";
  PutU32(&buf, 36 + data_bytes);
  buf += "WAVEfmt ";
  PutU32(&buf, 16);
  PutU16(&buf, 1);
  PutU16(&buf, 1);
  PutU32(&buf, static_cast<uint32_t>(clip.sample_rate_hz));
  PutU32(&buf, static_cast<uint32_t>(clip.sample_rate_hz) * 2);
  PutU16(&buf, 2);
  PutU16(&buf, 16);
  buf += "data";
  PutU32(&buf, data_bytes);
  for (double s : clip.samples) {
    const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    PutU16(&buf, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

Matrix FrameSignal(std::span<const double> signal, const FrameGrid &grid) {
  grid.Check();
  const std::size_t n = grid.NumFrames(signal.size());
  Matrix frames(static_cast<Eigen::Index>(n), grid.frame_len);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < grid.frame_len; ++j)
      frames(static_cast<Eigen::Index>(i), j) = signal[grid.FrameStart(i) + j];
  return frames;
}

AudioClip Preemphasize(const AudioClip &clip, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw Error(ErrorCode::kParameter, "pre-emphasis alpha outside [0, 1)");
  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.samples.resize(clip.samples.size());
  if (clip.samples.empty()) return out;
  out.samples[0] = clip.samples[0];
  for (std::size_t t = 1; t < clip.samples.size(); ++t)
    out.samples[t] = clip.samples[t] - alpha * clip.samples[t - 1];
  return out;
}

}  // namespace ovd
