// features/gammatone.cc

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
#include <numbers>

#include "ovd/pyknogram.h"

namespace ovd {

double Erb(double hz) { return 24.7 * (4.37 * hz / 1000.0 + 1.0); }

double HzToErbRate(double hz) {
  return 21.4 * std::log10(4.37 * hz / 1000.0 + 1.0);
}

double ErbRateToHz(double erb_rate) {
  return (std::pow(10.0, erb_rate / 21.4) - 1.0) * 1000.0 / 4.37;
}

GammatoneBank::GammatoneBank(std::vector<double> center_hz, int sample_rate)
    : sample_rate_(sample_rate), center_hz_(std::move(center_hz)) {
  const std::size_t n = center_hz_.size();
  bandwidth_hz_.resize(n);
  pole_.resize(n);
  stage_gain_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    bandwidth_hz_[c] = 1.019 * Erb(center_hz_[c]);
    const double radius =
        std::exp(-2.0 * std::numbers::pi * bandwidth_hz_[c] / sample_rate_);
    const double theta = 2.0 * std::numbers::pi * center_hz_[c] / sample_rate_;
    pole_[c] = std::polar(radius, theta);
    // |g / (1 - p e^{-j theta})| = 1 at the center frequency.
    stage_gain_[c] = 1.0 - radius;
  }
}

std::vector<double> GammatoneBank::Filter(std::span<const double> x,
                                          int channel) const {
  const std::complex<double> p = pole_.at(static_cast<std::size_t>(channel));
  const double g = stage_gain_[static_cast<std::size_t>(channel)];
  std::complex<double> s0, s1, s2, s3;
  std::vector<double> y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    s0 = g * x[n] + p * s0;
    s1 = g * s0 + p * s1;
    s2 = g * s1 + p * s2;
    s3 = g * s2 + p * s3;
    y[n] = 2.0 * s3.real();
  }
  return y;
}

std::vector<double> GammatoneBank::ImpulseResponse(int channel,
                                                   std::size_t length) const {
  std::vector<double> impulse(length, 0.0);
  if (length > 0) impulse[0] = 1.0;
  return Filter(impulse, channel);
}

GammatoneBank DesignGammatoneBank(int n_channels, double f_low_hz,
                                  double f_high_hz, int sample_rate) {
  if (n_channels < 1 || !(f_low_hz > 0.0) || !(f_high_hz > f_low_hz) ||
      !(f_high_hz < sample_rate / 2.0))
    throw Error(ErrorCode::kParameter,
                "gammatone bank needs 0 < f_low < f_high < fs/2");
  std::vector<double> centers(static_cast<std::size_t>(n_channels));
  const double lo = HzToErbRate(f_low_hz);
  const double hi = HzToErbRate(f_high_hz);
  for (int c = 0; c < n_channels; ++c) {
    const double frac = n_channels == 1 ? 0.0 : double(c) / (n_channels - 1);
    centers[c] = ErbRateToHz(lo + frac * (hi - lo));
  }
  centers.front() = f_low_hz;
  if (n_channels > 1) centers.back() = f_high_hz;
  return GammatoneBank(std::move(centers), sample_rate);
}

const GammatoneBank &DefaultGammatoneBank() {
  static const GammatoneBank bank = DesignGammatoneBank();
  return bank;
}

}  // namespace ovd
