// ovd/features.h

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

#ifndef OVD_FEATURES_H_
#define OVD_FEATURES_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovd/audio_io.h"
#include "ovd/base.h"

namespace ovd {

enum class FeatureKind : uint8_t {
  kMagSpec = 0,
  kMfb = 1,
  kMfcc = 2,
  kPykno = 3,
};

int FeatureDim(FeatureKind kind);
std::string_view FeatureName(FeatureKind kind);  // "magspec", "mfb", ...
std::optional<FeatureKind> ParseFeatureKind(std::string_view name);

/// frames x dim; dim always equals FeatureDim(kind).
struct FeatureMatrix {
  FeatureKind kind = FeatureKind::kMfcc;
  Matrix data;

  FeatureMatrix() = default;
  FeatureMatrix(FeatureKind k, Matrix m);

  Eigen::Index frames() const { return data.rows(); }
  Eigen::Index dim() const { return data.cols(); }
};

// ---------------------------------------------------------------------------
// Spectral front-end

constexpr int kFftSize = 512;
constexpr double kPreemphasis = 0.97;
constexpr double kLogFloor = 1e-10;

/// Symmetric Hamming window, 0.54 - 0.46 cos(2 pi n / (N - 1)).
std::vector<double> HammingWindow(int length);

/// Hamming-windowed frames zero-padded to fft_size; returns the magnitude of
/// the first fft_size/2 + 1 bins per frame.
Matrix StftMagnitude(std::span<const double> signal, const FrameGrid &grid,
                     int fft_size = kFftSize);

/// 257-dim spectral magnitude (no pre-emphasis).
FeatureMatrix ExtractMagSpec(const AudioClip &clip, const FrameGrid &grid);

struct MelBank {
  int n_filters = 40;
  int fft_bins = kFftSize / 2 + 1;
  double f_low_hz = 0.0;
  double f_high_hz = kSampleRate / 2.0;
  std::vector<double> center_hz;
  Matrix weights;  // n_filters x fft_bins, triangular in the mel domain
};

double HzToMel(double hz);
double MelToHz(double mel);

MelBank MakeMelBank(int n_filters = 40, int fft_size = kFftSize,
                    double f_low_hz = 0.0,
                    double f_high_hz = kSampleRate / 2.0,
                    int sample_rate = kSampleRate);

/// log(weights * |X|^2 + 1e-10) per frame.
FeatureMatrix MelFilterbank(const FeatureMatrix &mag, const MelBank &bank);

/// 40-dim log-mel energies of the pre-emphasized clip.
FeatureMatrix ExtractMfb(const AudioClip &clip, const FrameGrid &grid);

/// Orthonormal DCT-II and its inverse (DCT-III).
std::vector<double> DctII(std::span<const double> x);
std::vector<double> InverseDctII(std::span<const double> c);

/// Sinusoidal lifter on c_1..c_n: c'_k = (1 + L/2 sin(pi k / L)) c_k.
/// Element 0 of `c` is coefficient 1.
std::vector<double> Lifter(std::span<const double> c, int L = 22);

/// Regression deltas over +-N frames with edge replication.
Matrix Deltas(const Matrix &coeffs, int N = 2);

/// 39-dim MFCC: [log-energy, c1..c12] liftered, plus deltas and
/// delta-deltas.
FeatureMatrix ExtractMfcc(const AudioClip &clip, const FrameGrid &grid);

// ---------------------------------------------------------------------------
// Normalization

struct Normalizer {
  FeatureKind kind = FeatureKind::kMfcc;
  Vector mean;
  Vector stddev;

  static constexpr double kStdFloor = 1e-8;

  Matrix Apply(const Matrix &m) const;
  Matrix Unapply(const Matrix &m) const;
};

/// Streams training-split matrices through a numerically stable
/// mean/variance merge.
class NormalizerAccumulator {
 public:
  explicit NormalizerAccumulator(FeatureKind kind);
  void Add(const FeatureMatrix &fm);
  /// Throws ErrorCode::kData when nothing was added.
  Normalizer Finish() const;

 private:
  FeatureKind kind_;
  double count_ = 0.0;
  Vector mean_;
  Vector m2_;
};

Normalizer FitNormalizer(std::span<const FeatureMatrix> train_features);

void SaveNormalizer(const Normalizer &norm, const std::filesystem::path &path);
Normalizer LoadNormalizer(const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// FTR1 feature files: "FTR1", kind (u8), dim (u32 LE), frames (u32 LE), then
// frames x dim float32 LE, row-major.

void WriteFeatures(const FeatureMatrix &fm, const std::filesystem::path &path);
FeatureMatrix ReadFeatures(const std::filesystem::path &path);

/// Dispatches to the extractor for `kind`. Pykno uses the default bank.
FeatureMatrix ExtractFeatures(FeatureKind kind, const AudioClip &clip,
                              const FrameGrid &grid);

}  // namespace ovd

#endif  // OVD_FEATURES_H_
