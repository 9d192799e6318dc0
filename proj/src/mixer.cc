// mixer.cc

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

#include "ovd/mixer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace ovd {

double MeanPower(std::span<const double> x, SampleRange range) {
  if (range.size() == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t n = range.begin; n < range.end; ++n) acc += x[n] * x[n];
  return acc / static_cast<double>(range.size());
}

double ScaleToSir(std::span<const double> target,
                  std::span<const double> interferer, double sir_db,
                  SampleRange region) {
  if (region.end > target.size() || region.end > interferer.size())
    throw Error(ErrorCode::kPrecondition, "SIR region outside the signals");
  const double p_target = MeanPower(target, region);
  const double p_interf = MeanPower(interferer, region);
  if (!(p_target > 0.0) || !(p_interf > 0.0))
    throw Error(ErrorCode::kDegenerateSource,
                "zero-energy source inside the overlap region");
  return std::sqrt(p_target / (p_interf * std::pow(10.0, sir_db / 10.0)));
}

std::vector<FrameLabel> LabelFrames(std::span<const double> target,
                                    std::span<const double> interferer,
                                    const FrameGrid &grid,
                                    double vad_threshold_db) {
  if (target.size() != interferer.size())
    throw Error(ErrorCode::kPrecondition, "sources must be aligned");
  grid.Check();
  const std::size_t n_frames = grid.NumFrames(target.size());

  auto active = [&](std::span<const double> x) {
    std::vector<double> energy(n_frames, 0.0);
    for (std::size_t f = 0; f < n_frames; ++f) {
      const std::size_t b = grid.FrameStart(f);
      for (int j = 0; j < grid.frame_len; ++j) energy[f] += x[b + j] * x[b + j];
    }
    const double max_energy =
        energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
    std::vector<bool> on(n_frames, false);
    if (!(max_energy > 0.0)) return on;
    const double threshold = max_energy * std::pow(10.0, vad_threshold_db / 10.0);
    for (std::size_t f = 0; f < n_frames; ++f)
      on[f] = energy[f] > 0.0 && energy[f] > threshold;
    return on;
  };

  const std::vector<bool> t_on = active(target);
  const std::vector<bool> i_on = active(interferer);
  std::vector<FrameLabel> labels(n_frames, FrameLabel::kSingle);
  for (std::size_t f = 0; f < n_frames; ++f)
    if (t_on[f] && i_on[f]) labels[f] = FrameLabel::kOverlap;
  return labels;
}

LabeledMixture MixAtOffset(const AudioClip &target, const AudioClip &interferer,
                           const MixtureSpec &spec, const FrameGrid &grid,
                           double vad_threshold_db) {
  if (target.sample_rate_hz != kSampleRate ||
      interferer.sample_rate_hz != kSampleRate)
    throw Error(ErrorCode::kRateMismatch, "mixing needs 8 kHz sources");
  if (spec.offset_samples >= target.size())
    throw Error(ErrorCode::kPrecondition,
                "offset " + std::to_string(spec.offset_samples) +
                    " not inside target of " + std::to_string(target.size()) +
                    " samples");
  if (interferer.size() == 0)
    throw Error(ErrorCode::kDegenerateSource, "empty interferer");

  const std::size_t off = spec.offset_samples;
  const std::size_t len = std::max(target.size(), off + interferer.size());
  std::vector<double> t_placed(len, 0.0), i_placed(len, 0.0);
  std::copy(target.samples.begin(), target.samples.end(), t_placed.begin());
  std::copy(interferer.samples.begin(), interferer.samples.end(),
            i_placed.begin() + static_cast<std::ptrdiff_t>(off));

  LabeledMixture mix;
  mix.grid = grid;
  mix.overlap = {off, std::min(target.size(), off + interferer.size())};
  mix.gain = ScaleToSir(t_placed, i_placed, spec.sir_db, mix.overlap);
  for (double &v : i_placed) v *= mix.gain;

  mix.clip.samples.resize(len);
  double peak = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    mix.clip.samples[n] = t_placed[n] + i_placed[n];
    peak = std::max(peak, std::abs(mix.clip.samples[n]));
  }
  if (peak > 1.0) {
    mix.rescale_factor = 1.0 / peak;
    for (double &v : mix.clip.samples) v *= mix.rescale_factor;
  }
  mix.realized_sir_db = 10.0 * std::log10(MeanPower(t_placed, mix.overlap) /
                                          MeanPower(i_placed, mix.overlap));
  mix.labels = LabelFrames(t_placed, i_placed, grid, vad_threshold_db);
  return mix;
}

AudioClip SynthSpeechlike(double duration_s, double f0_hz, uint64_t seed) {
  if (!(f0_hz >= 50.0 && f0_hz <= 400.0))
    throw Error(ErrorCode::kParameter, "f0 must lie in [50, 400] Hz");
  if (!(duration_s >= 0.0))
    throw Error(ErrorCode::kParameter, "negative duration");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double fs = kSampleRate;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
  AudioClip clip;
  clip.samples.assign(n, 0.0);
  if (n == 0) return clip;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double vib_rate = 4.5 + 2.0 * unit(rng);
  const double vib_phase = kTwoPi * unit(rng);
  const double drift_rate = 0.3 + 0.5 * unit(rng);
  const double drift_phase = kTwoPi * unit(rng);
  const double syl_rate = 3.0 + 2.0 * unit(rng);
  const double syl_phase = kTwoPi * unit(rng);
  const double formant1 = 500.0 + 300.0 * unit(rng);
  const double formant2 = 1200.0 + 1000.0 * unit(rng);

  // Harmonics up to 3800 Hz; 1/h roll-off with formant boosts below 1.8x so
  // the fundamental stays the strongest partial.
  const int n_harm = std::max(1, static_cast<int>(3800.0 / (f0_hz * 1.03)));
  std::vector<double> harm_amp(static_cast<std::size_t>(n_harm));
  std::vector<double> harm_phase(static_cast<std::size_t>(n_harm));
  for (int h = 1; h <= n_harm; ++h) {
    const double f = h * f0_hz;
    const double boost = 0.5 * std::exp(-std::pow((f - formant1) / 150.0, 2)) +
                         0.3 * std::exp(-std::pow((f - formant2) / 250.0, 2));
    harm_amp[h - 1] = (1.0 + boost) / h;
    harm_phase[h - 1] = kTwoPi * unit(rng);
  }

  std::vector<double> voiced(n), noise(n);
  double phase = 0.0, lp = 0.0, voiced_energy = 0.0, noise_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double f0 = f0_hz * (1.0 + 0.015 * std::sin(kTwoPi * vib_rate * t + vib_phase) +
                               0.015 * std::sin(kTwoPi * drift_rate * t + drift_phase));
    double v = 0.0;
    for (int h = 1; h <= n_harm; ++h) {
      if (h * f0 >= 0.5 * fs) break;
      v += harm_amp[h - 1] * std::sin(h * phase + harm_phase[h - 1]);
    }
    phase = std::fmod(phase + kTwoPi * f0 / fs, kTwoPi);
    lp = 0.9 * lp + 0.1 * gauss(rng);
    voiced[i] = v;
    noise[i] = lp;
    voiced_energy += v * v;
    noise_energy += lp * lp;
  }
  const double noise_gain =
      noise_energy > 0.0 ? 0.05 * std::sqrt(voiced_energy / noise_energy) : 0.0;

  const double ramp = 0.01 * fs;
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    double env = 0.7 + 0.3 * (0.5 - 0.5 * std::cos(kTwoPi * syl_rate * t + syl_phase));
    const double edge = std::min<double>(static_cast<double>(i), static_cast<double>(n - 1 - i));
    if (edge < ramp) env *= (edge + 1.0) / (ramp + 1.0);
    clip.samples[i] = env * (voiced[i] + noise_gain * noise[i]);
    peak = std::max(peak, std::abs(clip.samples[i]));
  }
  if (peak > 0.0)
    for (double &s : clip.samples) s *= 0.9 / peak;
  return clip;
}

void WriteLabels(std::span<const FrameLabel> labels,
                 const std::filesystem::path &path) {
  std::string buf;
  buf.reserve(labels.size() * 2);
  for (FrameLabel l : labels) {
    buf.push_back(l == FrameLabel::kOverlap ? 'O' : 'S');
    buf.push_back('\n');
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  os << buf;
  if (!os) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::vector<FrameLabel> ReadLabels(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<FrameLabel> labels;
  std::string line;
  while (std::getline(is, line)) {
    if (line == "O")
      labels.push_back(FrameLabel::kOverlap);
    else if (line == "S")
      labels.push_back(FrameLabel::kSingle);
    else
      throw Error(ErrorCode::kFormat,
                  path.string() + ": bad label line '" + line + "'");
  }
  return labels;
}

}  // namespace ovd
