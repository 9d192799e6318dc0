// features/pyknogram.cc

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

#include <cmath>

#include "ovd/pyknogram.h"

namespace ovd {

Matrix PyknogramEnergy(const AudioClip &clip, const GammatoneBank &bank,
                       const FrameGrid &grid) {
  grid.Check();
  if (clip.sample_rate_hz != bank.sample_rate())
    throw Error(ErrorCode::kRateMismatch,
                "clip rate does not match gammatone bank rate");
  const std::size_t n_frames = grid.NumFrames(clip.size());
  const int n_channels = bank.num_channels();
  Matrix energy = Matrix::Zero(static_cast<Eigen::Index>(n_frames), n_channels);
  if (n_frames == 0) return energy;

  const std::size_t len = clip.size();
  std::vector<double> sample_energy(len);
  std::vector<uint8_t> accepted(len);
  for (int c = 0; c < n_channels; ++c) {
    const std::vector<double> band = bank.Filter(clip.view(), c);
    const Demodulation d = Desa1(band, bank.sample_rate());
    const double fc = bank.center_hz()[c];
    const double half_bw = 0.5 * bank.bandwidth_hz()[c];
    for (std::size_t n = 0; n < len; ++n) {
      accepted[n] = d.valid[n] && std::abs(d.freq_hz[n] - fc) <= half_bw;
      sample_energy[n] = d.amp[n] * d.amp[n];
    }
    for (std::size_t f = 0; f < n_frames; ++f) {
      const std::size_t b = grid.FrameStart(f);
      const std::size_t e = b + static_cast<std::size_t>(grid.frame_len);
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t n = b; n < e; ++n) {
        if (!accepted[n]) continue;
        sum += sample_energy[n];
        ++count;
      }
      if (count > 0)
        energy(static_cast<Eigen::Index>(f), c) = sum / static_cast<double>(count);
    }
  }
  return energy;
}

FeatureMatrix Pyknogram(const AudioClip &clip, const GammatoneBank &bank,
                        const FrameGrid &grid) {
  Matrix energy = PyknogramEnergy(clip, bank, grid);
  energy = (energy.array() + kLogFloor).log().matrix();
  return FeatureMatrix(FeatureKind::kPykno, std::move(energy));
}

}  // namespace ovd
