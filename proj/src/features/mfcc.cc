// features/mfcc.cc

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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ovd/features.h"

namespace ovd {

namespace {

constexpr int kNumCeps = 12;
constexpr int kLifter = 22;
constexpr int kDeltaWindow = 2;

double DctScale(int k, int n) {
  return k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
}

}  // namespace

std::vector<double> DctII(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> c(x.size(), 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += x[i] * std::cos(std::numbers::pi * k * (2 * i + 1) / (2.0 * n));
    c[k] = DctScale(k, n) * acc;
  }
  return c;
}

std::vector<double> InverseDctII(std::span<const double> c) {
  const int n = static_cast<int>(c.size());
  std::vector<double> x(c.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k)
      acc += DctScale(k, n) * c[k] *
             std::cos(std::numbers::pi * k * (2 * i + 1) / (2.0 * n));
    x[i] = acc;
  }
  return x;
}

std::vector<double> Lifter(std::span<const double> c, int L) {
  if (L <= 0) throw Error(ErrorCode::kParameter, "lifter length must be > 0");
  std::vector<double> out(c.begin(), c.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    out[i] *= 1.0 + 0.5 * L * std::sin(std::numbers::pi * k / L);
  }
  return out;
}

Matrix Deltas(const Matrix &coeffs, int N) {
  if (N < 1) throw Error(ErrorCode::kParameter, "delta window must be >= 1");
  const Eigen::Index T = coeffs.rows();
  Matrix out = Matrix::Zero(T, coeffs.cols());
  if (T == 0) return out;
  double denom = 0.0;
  for (int n = 1; n <= N; ++n) denom += n * n;
  denom *= 2.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int n = 1; n <= N; ++n) {
      const Eigen::Index ahead = std::min<Eigen::Index>(t + n, T - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(t - n, 0);
      out.row(t) += n * (coeffs.row(ahead) - coeffs.row(behind));
    }
  }
  return out / denom;
}

FeatureMatrix ExtractMfcc(const AudioClip &clip, const FrameGrid &grid) {
  static const MelBank bank = MakeMelBank();
  const AudioClip emph = Preemphasize(clip, kPreemphasis);
  const FeatureMatrix logmel =
      MelFilterbank(ExtractMagSpec(emph, grid), bank);
  const Matrix frames = FrameSignal(emph.view(), grid);

  const Eigen::Index T = logmel.frames();
  if (T == 0)
    return FeatureMatrix(FeatureKind::kMfcc, Matrix(0, 3 * (kNumCeps + 1)));
  Matrix statics(T, kNumCeps + 1);
  std::vector<double> row(static_cast<std::size_t>(bank.n_filters));
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int m = 0; m < bank.n_filters; ++m) row[m] = logmel.data(t, m);
    const std::vector<double> dct = DctII(row);
    const std::vector<double> ceps =
        Lifter(std::span<const double>(dct).subspan(1, kNumCeps), kLifter);
    statics(t, 0) = std::log(frames.row(t).squaredNorm() + kLogFloor);
    for (int k = 0; k < kNumCeps; ++k) statics(t, k + 1) = ceps[k];
  }
  const Matrix d1 = Deltas(statics, kDeltaWindow);
  const Matrix d2 = Deltas(d1, kDeltaWindow);
  Matrix out(T, 3 * (kNumCeps + 1));
  out << statics, d1, d2;
  return FeatureMatrix(FeatureKind::kMfcc, std::move(out));
}

}  // namespace ovd
