// features/mel.cc

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

#include "ovd/features.h"

namespace ovd {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelBank MakeMelBank(int n_filters, int fft_size, double f_low_hz,
                    double f_high_hz, int sample_rate) {
  if (n_filters <= 0 || fft_size <= 0 || !(f_low_hz >= 0.0) ||
      !(f_high_hz > f_low_hz) || f_high_hz > sample_rate / 2.0)
    throw Error(ErrorCode::kParameter, "invalid mel filterbank parameters");
  MelBank bank;
  bank.n_filters = n_filters;
  bank.fft_bins = fft_size / 2 + 1;
  bank.f_low_hz = f_low_hz;
  bank.f_high_hz = f_high_hz;
  bank.weights = Matrix::Zero(n_filters, bank.fft_bins);

  const double mel_low = HzToMel(f_low_hz);
  const double mel_high = HzToMel(f_high_hz);
  const double step = (mel_high - mel_low) / (n_filters + 1);
  bank.center_hz.resize(static_cast<std::size_t>(n_filters));
  for (int m = 0; m < n_filters; ++m) {
    const double left = mel_low + m * step;
    const double center = left + step;
    const double right = center + step;
    bank.center_hz[m] = MelToHz(center);
    for (int k = 0; k < bank.fft_bins; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * sample_rate / fft_size);
      double w = 0.0;
      if (mel > left && mel <= center)
        w = (mel - left) / step;
      else if (mel > center && mel < right)
        w = (right - mel) / step;
      bank.weights(m, k) = w;
    }
  }
  return bank;
}

FeatureMatrix MelFilterbank(const FeatureMatrix &mag, const MelBank &bank) {
  if (mag.dim() != bank.fft_bins)
    throw Error(ErrorCode::kShape, "magnitude bins do not match mel bank");
  const Matrix power = mag.data.array().square().matrix();
  Matrix energies = power * bank.weights.transpose();
  energies = (energies.array() + kLogFloor).log().matrix();
  return FeatureMatrix(FeatureKind::kMfb, std::move(energies));
}

FeatureMatrix ExtractMfb(const AudioClip &clip, const FrameGrid &grid) {
  static const MelBank bank = MakeMelBank();
  const AudioClip emph = Preemphasize(clip, kPreemphasis);
  return MelFilterbank(ExtractMagSpec(emph, grid), bank);
}

}  // namespace ovd
