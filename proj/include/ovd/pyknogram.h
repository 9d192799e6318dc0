// ovd/pyknogram.h

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

// Teager-Kaiser energy, DESA-1 demodulation and the gammatone front-end used
// to build pyknograms: per channel, instantaneous frequency estimates that
// fall inside the channel's band are kept and their energy is pooled per
// frame.

#ifndef OVD_PYKNOGRAM_H_
#define OVD_PYKNOGRAM_H_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "ovd/audio_io.h"
#include "ovd/features.h"

namespace ovd {

/// psi(n) = x(n)^2 - x(n-1) x(n+1) for n = 1..len-2. Output has len-2
/// samples; throws kLength for inputs shorter than 3.
std::vector<double> Teo(std::span<const double> x);

/// Per-sample DESA-1 estimates, aligned with the input. Samples with no
/// estimate (edges, non-positive energy, arccos argument outside [-1, 1])
/// have valid[n] == 0 and amp/freq of 0.
struct Demodulation {
  std::vector<double> amp;
  std::vector<double> freq_hz;
  std::vector<uint8_t> valid;
};

Demodulation Desa1(std::span<const double> x, int sample_rate = kSampleRate);

/// Equivalent rectangular bandwidth, 24.7 (4.37 f / 1000 + 1).
double Erb(double hz);
double HzToErbRate(double hz);
double ErbRateToHz(double erb_rate);

/// 4th-order gammatone channels realized as four cascaded complex one-pole
/// sections. The band-passed signal is twice the real part of the complex
/// output, so a tone at the center frequency passes with unit gain away
/// from Nyquist.
class GammatoneBank {
 public:
  static constexpr int kOrder = 4;

  GammatoneBank(std::vector<double> center_hz, int sample_rate);

  int num_channels() const { return static_cast<int>(center_hz_.size()); }
  int sample_rate() const { return sample_rate_; }
  const std::vector<double> &center_hz() const { return center_hz_; }
  /// 1.019 ERB(fc), the gammatone bandwidth parameter.
  const std::vector<double> &bandwidth_hz() const { return bandwidth_hz_; }

  std::vector<double> Filter(std::span<const double> x, int channel) const;
  std::vector<double> ImpulseResponse(int channel, std::size_t length) const;

 private:
  int sample_rate_;
  std::vector<double> center_hz_;
  std::vector<double> bandwidth_hz_;
  std::vector<std::complex<double>> pole_;
  std::vector<double> stage_gain_;
};

/// Centers uniformly spaced on the ERB-rate scale between f_low and f_high
/// (inclusive). Throws kParameter unless 0 < f_low < f_high < fs/2.
GammatoneBank DesignGammatoneBank(int n_channels = 120, double f_low_hz = 50.0,
                                  double f_high_hz = 3800.0,
                                  int sample_rate = kSampleRate);

/// Linear-domain pyknogram: frames x channels, each entry the mean squared
/// DESA amplitude over the frame's accepted samples (0 when none). A sample
/// is accepted when its estimate is valid and lies within half a bandwidth of
/// the channel center.
Matrix PyknogramEnergy(const AudioClip &clip, const GammatoneBank &bank,
                       const FrameGrid &grid);

/// log(PyknogramEnergy + 1e-10).
FeatureMatrix Pyknogram(const AudioClip &clip, const GammatoneBank &bank,
                        const FrameGrid &grid);

/// The default 120-channel bank over [50, 3800] Hz, built once.
const GammatoneBank &DefaultGammatoneBank();

}  // namespace ovd

#endif  // OVD_PYKNOGRAM_H_
