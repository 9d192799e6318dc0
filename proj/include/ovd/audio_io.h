// ovd/audio_io.h

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

#ifndef OVD_AUDIO_IO_H_
#define OVD_AUDIO_IO_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

#include "ovd/base.h"

namespace ovd {

/// Mono audio. Samples are in [-1, 1]; everything downstream of ingestion
/// runs at kSampleRate.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = kSampleRate;

  std::size_t size() const { return samples.size(); }
  std::span<const double> view() const { return samples; }
};

/// Frame layout in samples. The defaults are 25 ms frames with a 10 ms hop
/// at 8 kHz.
struct FrameGrid {
  int frame_len = 200;
  int hop = 80;

  /// floor((n - frame_len) / hop) + 1 for n >= frame_len, else 0.
  std::size_t NumFrames(std::size_t num_samples) const;
  std::size_t FrameStart(std::size_t frame) const {
    return frame * static_cast<std::size_t>(hop);
  }
  void Check() const;
};

/// Reads a RIFF/WAVE file holding 16-bit mono PCM at 8 kHz. Samples are
/// scaled by 1/32768.
AudioClip ReadWav(const std::filesystem::path &path);
AudioClip ReadWav(std::istream &is);

/// Writes 16-bit mono PCM; values are rounded to the nearest step and
/// saturated to the int16 range.
void WriteWav(const AudioClip &clip, const std::filesystem::path &path);

/// Returns one row per complete frame; partial trailing frames are dropped.
Matrix FrameSignal(std::span<const double> signal, const FrameGrid &grid);

/// y(0) = x(0), y(t) = x(t) - alpha * x(t-1).
AudioClip Preemphasize(const AudioClip &clip, double alpha = 0.97);

}  // namespace ovd

#endif  // OVD_AUDIO_IO_H_
