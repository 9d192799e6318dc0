// features/stft.cc

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

#include <fftw3.h>

#include "ovd/features.h"

namespace ovd {

namespace {

// Owns a real-to-complex plan and its buffers.
class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(static_cast<std::size_t>(n));
    out_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  double *input() { return in_; }
  void Execute() { fftw_execute(plan_); }
  double Magnitude(int k) const { return std::hypot(out_[k][0], out_[k][1]); }

 private:
  int n_;
  double *in_;
  fftw_complex *out_;
  fftw_plan plan_;
};

}  // namespace

std::vector<double> HammingWindow(int length) {
  std::vector<double> w(static_cast<std::size_t>(length), 1.0);
  if (length == 1) return w;
  for (int n = 0; n < length; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (length - 1));
  return w;
}

Matrix StftMagnitude(std::span<const double> signal, const FrameGrid &grid,
                     int fft_size) {
  grid.Check();
  if (fft_size < grid.frame_len)
    throw Error(ErrorCode::kParameter, "fft_size smaller than frame length");
  const std::size_t n_frames = grid.NumFrames(signal.size());
  const int n_bins = fft_size / 2 + 1;
  Matrix mag(static_cast<Eigen::Index>(n_frames), n_bins);
  if (n_frames == 0) return mag;

  const std::vector<double> window = HammingWindow(grid.frame_len);
  RealFft fft(fft_size);
  double *in = fft.input();
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t start = grid.FrameStart(f);
    for (int j = 0; j < grid.frame_len; ++j)
      in[j] = signal[start + j] * window[j];
    for (int j = grid.frame_len; j < fft_size; ++j) in[j] = 0.0;
    fft.Execute();
    for (int k = 0; k < n_bins; ++k)
      mag(static_cast<Eigen::Index>(f), k) = fft.Magnitude(k);
  }
  return mag;
}

FeatureMatrix ExtractMagSpec(const AudioClip &clip, const FrameGrid &grid) {
  return FeatureMatrix(FeatureKind::kMagSpec,
                       StftMagnitude(clip.view(), grid, kFftSize));
}

}  // namespace ovd
