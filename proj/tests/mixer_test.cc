// tests/mixer_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "oracles.h"
#include "ovd/mixer.h"

using namespace ovd;

namespace {

AudioClip Noise(std::size_t n, double scale, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  AudioClip c;
  c.samples.resize(n);
  for (double &v : c.samples) v = g(rng);
  return c;
}

double Power(const std::vector<double> &x, std::size_t b, std::size_t e) {
  double s = 0.0;
  for (std::size_t i = b; i < e; ++i) s += x[i] * x[i];
  return s / static_cast<double>(e - b);
}

// SIR recovered from the output alone: the target component is the known
// target times the recorded rescale factor, the rest is interference.
double MeasuredSir(const LabeledMixture &mix, const AudioClip &target,
                   std::size_t offset, std::size_t interferer_len) {
  const std::size_t b = offset, e = std::min(target.size(), offset + interferer_len);
  std::vector<double> t(e - b), i(e - b);
  for (std::size_t n = b; n < e; ++n) {
    t[n - b] = mix.rescale_factor * target.samples[n];
    i[n - b] = mix.clip.samples[n] - t[n - b];
  }
  return 10 * std::log10(Power(t, 0, t.size()) / Power(i, 0, i.size()));
}

std::string Slurp(const std::filesystem::path &p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scale_to_sir examples") {
  const AudioClip a = Noise(4000, 0.3, 1);
  std::vector<double> b = a.samples;
  std::reverse(b.begin(), b.end());  // equal power
  const SampleRange all{0, 4000};
  CHECK(ScaleToSir(a.samples, b, 0.0, all) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ScaleToSir(a.samples, b, 5.0, all) == doctest::Approx(0.5623413251903491).epsilon(1e-9));
  std::vector<double> half = a.samples;
  for (double &v : half) v *= 0.5;  // quarter power
  CHECK(ScaleToSir(a.samples, half, 0.0, all) == doctest::Approx(2.0).epsilon(1e-12));
  std::vector<double> zero(4000, 0.0);
  try {
    ScaleToSir(a.samples, zero, 0.0, all);
    FAIL("zero power accepted");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kDegenerateSource);
  }
  CHECK_THROWS_AS(ScaleToSir(zero, a.samples, 0.0, all), Error);
  CHECK_THROWS_AS(ScaleToSir(a.samples, b, 0.0, SampleRange{10, 10}), Error);
}

TEST_CASE("label_frames examples") {
  const FrameGrid grid;
  const std::size_t n = 200 + 80 * 19;  // 20 frames
  const AudioClip t = Noise(n, 0.5, 2);
  std::vector<double> zero(n, 0.0);
  for (FrameLabel l : LabelFrames(t.samples, zero, grid)) CHECK(l == FrameLabel::kSingle);
  const AudioClip i = Noise(n, 0.5, 3);
  for (FrameLabel l : LabelFrames(t.samples, i.samples, grid)) CHECK(l == FrameLabel::kOverlap);

  // Gated bursts: target active in frames 0..9, interferer in frames 5..14.
  std::vector<double> gt(n, 0.0), gi(n, 0.0);
  for (std::size_t s = 0; s < 9 * 80 + 200; ++s) gt[s] = t.samples[s];
  for (std::size_t s = 5 * 80; s < 14 * 80 + 200; ++s) gi[s] = i.samples[s];
  const auto labels = LabelFrames(gt, gi, grid);
  REQUIRE(labels.size() == 20);
  // Frames whose window touches a burst edge see partial energy; those still
  // count as active, so the intersection grows by the frame overlap.
  std::set<std::size_t> want;
  for (std::size_t f = 0; f < 20; ++f) {
    const std::size_t b = f * 80, e = b + 200;
    const bool t_on = b < 9 * 80 + 200;
    const bool i_on = e > 5 * 80 && b < 14 * 80 + 200;
    if (t_on && i_on) want.insert(f);
  }
  for (std::size_t f = 0; f < 20; ++f)
    CHECK((labels[f] == FrameLabel::kOverlap) == (want.count(f) == 1));
  for (std::size_t f = 5; f <= 9; ++f) CHECK(labels[f] == FrameLabel::kOverlap);
}

TEST_CASE("label_frames respects the relative threshold") {
  const FrameGrid grid;
  std::vector<double> t(200 * 3, 0.0), i(600, 0.0);
  for (std::size_t s = 0; s < 600; ++s) {
    t[s] = s < 200 ? 1.0 : (s < 400 ? 0.011 : 0.009);  // -39.2 dB, -40.9 dB
    i[s] = 0.5;
  }
  FrameGrid g3;
  g3.frame_len = 200;
  g3.hop = 200;
  const auto labels = LabelFrames(t, i, g3);
  REQUIRE(labels.size() == 3);
  CHECK(labels[0] == FrameLabel::kOverlap);
  CHECK(labels[1] == FrameLabel::kOverlap);
  CHECK(labels[2] == FrameLabel::kSingle);
  (void)grid;
}

TEST_CASE("mix_at_offset geometry and components") {
  const AudioClip target = Noise(8000, 0.2, 4);
  const AudioClip interf = Noise(6000, 0.1, 5);
  MixtureSpec spec;
  spec.sir_db = 2.0;
  spec.offset_samples = 4000;
  const LabeledMixture mix = MixAtOffset(target, interf, spec);
  CHECK(mix.clip.size() == 10000);
  CHECK(mix.overlap.begin == 4000);
  CHECK(mix.overlap.end == 8000);
  CHECK(mix.labels.size() == FrameGrid{}.NumFrames(10000));
  CHECK(std::abs(MeasuredSir(mix, target, 4000, 6000) - 2.0) < 0.1);
  CHECK(std::abs(mix.realized_sir_db - 2.0) < 0.1);
  // Removing the interferer restores the target outside the overlap.
  for (std::size_t n = 0; n < 4000; ++n)
    REQUIRE(mix.clip.samples[n] / mix.rescale_factor ==
            doctest::Approx(target.samples[n]).epsilon(1e-12));
  // Past the target only the scaled interferer remains.
  for (std::size_t n = 8000; n < 10000; n += 97)
    CHECK(mix.clip.samples[n] ==
          doctest::Approx(mix.rescale_factor * mix.gain * interf.samples[n - 4000]));
}

TEST_CASE("mix_at_offset boundary cases") {
  const AudioClip target = SynthSpeechlike(1.0, 150, 1);
  const AudioClip interf = SynthSpeechlike(1.0, 210, 2);
  MixtureSpec spec;
  spec.sir_db = 3.0;

  spec.offset_samples = 0;
  const LabeledMixture full = MixAtOffset(target, interf, spec);
  CHECK(full.clip.size() == 8000);
  const auto lt = LabelFrames(target.samples, std::vector<double>(8000, 0.0), FrameGrid{});
  std::vector<double> placed(8000);
  for (std::size_t n = 0; n < 8000; ++n) placed[n] = full.gain * interf.samples[n];
  const auto both = LabelFrames(target.samples, placed, FrameGrid{});
  for (std::size_t f = 0; f < full.labels.size(); ++f) CHECK(full.labels[f] == both[f]);
  std::size_t overlap = std::count(full.labels.begin(), full.labels.end(), FrameLabel::kOverlap);
  CHECK(overlap >= full.labels.size() - 2);
  (void)lt;

  spec.offset_samples = 7999;
  const LabeledMixture synth_edge = MixAtOffset(target, interf, spec);
  CHECK(synth_edge.overlap.size() == 1);
  const LabeledMixture edge = MixAtOffset(target, interf, spec);
  CHECK(edge.overlap.size() == 1);
  CHECK(edge.clip.size() == 7999 + 8000);
  std::vector<double> t2(edge.clip.size(), 0.0), i2(edge.clip.size(), 0.0);
  for (std::size_t n = 0; n < 8000; ++n) t2[n] = target.samples[n];
  for (std::size_t n = 0; n < 8000; ++n) i2[7999 + n] = edge.gain * interf.samples[n];
  CHECK(edge.labels == LabelFrames(t2, i2, FrameGrid{}));

  spec.offset_samples = 8000;
  try {
    MixAtOffset(target, interf, spec);
    FAIL("offset past target accepted");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kPrecondition);
  }
  AudioClip wrong_rate = interf;
  wrong_rate.sample_rate_hz = 16000;
  spec.offset_samples = 10;
  CHECK_THROWS_AS(MixAtOffset(target, wrong_rate, spec), Error);
}

TEST_CASE("mix_at_offset rescales loud sums") {
  AudioClip t, i;
  t.samples.assign(1000, 0.9);
  i.samples.assign(1000, -0.9);
  for (std::size_t n = 0; n < 1000; n += 2) i.samples[n] = 0.9;
  MixtureSpec spec;
  spec.sir_db = 0.0;
  const LabeledMixture mix = MixAtOffset(t, i, spec);
  double peak = 0;
  for (double v : mix.clip.samples) peak = std::max(peak, std::abs(v));
  CHECK(peak == doctest::Approx(1.0));
  CHECK(mix.rescale_factor == doctest::Approx(1.0 / 1.8));
  CHECK(std::abs(mix.realized_sir_db) < 1e-9);
}

TEST_CASE("realized SIR tracks the request over random specs") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const double tl = 0.5 + 1.5 * (rng() % 1000) / 1000.0;
    const double il = 0.5 + 1.5 * (rng() % 1000) / 1000.0;
    const AudioClip target = SynthSpeechlike(tl, 100 + rng() % 200, rng());
    const AudioClip interf = SynthSpeechlike(il, 100 + rng() % 200, rng());
    MixtureSpec spec;
    spec.sir_db = 5.0 * (rng() % 10000) / 10000.0;
    spec.offset_samples = rng() % target.size();
    const LabeledMixture mix = MixAtOffset(target, interf, spec);
    REQUIRE(std::abs(MeasuredSir(mix, target, spec.offset_samples, interf.size()) -
                     spec.sir_db) <= 0.1);
    REQUIRE(mix.labels.size() == FrameGrid{}.NumFrames(mix.clip.size()));
  }
}

TEST_CASE("label count equals frame count for all lengths") {
  for (std::size_t n = 0; n < 1200; n += 7) {
    std::vector<double> x(n, 0.1);
    CHECK(LabelFrames(x, x, FrameGrid{}).size() == FrameGrid{}.NumFrames(n));
  }
}

TEST_CASE("synth_speechlike") {
  const AudioClip a = SynthSpeechlike(1.0, 120, 5);
  CHECK(a.size() == 8000);
  CHECK(a.samples == SynthSpeechlike(1.0, 120, 5).samples);
  CHECK(a.samples != SynthSpeechlike(1.0, 120, 6).samples);
  double peak = 0;
  for (double v : a.samples) peak = std::max(peak, std::abs(v));
  CHECK(peak == doctest::Approx(0.9));
  // Dominant low-frequency peak by direct DTFT on a 1 Hz grid.
  double best = -1, arg = 0;
  for (double f = 40; f <= 400; f += 1) {
    const double m = oracle::DtftMagnitude(a.samples, f, 8000);
    if (m > best) {
      best = m;
      arg = f;
    }
  }
  CHECK(std::abs(arg - 120) <= 5);
  CHECK(SynthSpeechlike(0.0, 120, 1).size() == 0);
  CHECK_THROWS_AS(SynthSpeechlike(1.0, 40, 1), Error);
  CHECK_THROWS_AS(SynthSpeechlike(1.0, 401, 1), Error);
}

TEST_CASE("label files") {
  oracle::TempDir dir("lab");
  const std::vector<FrameLabel> labels = {FrameLabel::kOverlap, FrameLabel::kSingle,
                                          FrameLabel::kSingle};
  WriteLabels(labels, dir.path() / "a.lab");
  CHECK(Slurp(dir.path() / "a.lab") == "O\nS\nS\n");
  CHECK(ReadLabels(dir.path() / "a.lab") == labels);
  std::ofstream(dir.path() / "b.lab") << "O\nX\n";
  CHECK_THROWS_AS(ReadLabels(dir.path() / "b.lab"), Error);
  CHECK_THROWS_AS(ReadLabels(dir.path() / "missing.lab"), Error);
}

TEST_CASE("dataset plan keeps test speakers disjoint for every seed") {
  const Corpus corpus = SyntheticCorpus(8, 30, 1.0, 2.0, 1);
  const SplitSizes sizes{120.0, 30.0, 30.0};
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const DatasetManifest m = PlanDataset(corpus, sizes, seed);
    const auto &part = m.speaker_partition;
    std::set<std::string> test(part.at(Split::kTest).begin(), part.at(Split::kTest).end());
    for (Split s : {Split::kTrain, Split::kDev})
      for (const std::string &spk : part.at(s)) REQUIRE(test.count(spk) == 0);
    std::set<std::string> targets;
    for (const ManifestEntry &e : m.entries) {
      const auto &own = part.at(e.split);
      const std::string ts = corpus.Find(e.spec.target_key).speaker;
      const std::string is = corpus.Find(e.spec.interferer_key).speaker;
      REQUIRE(ts != is);
      REQUIRE(std::find(own.begin(), own.end(), ts) != own.end());
      REQUIRE(std::find(own.begin(), own.end(), is) != own.end());
      REQUIRE(e.spec.sir_db >= 0.0);
      REQUIRE(e.spec.sir_db < 5.0);
      REQUIRE(e.spec.offset_samples < corpus.Find(e.spec.target_key).num_samples);
      REQUIRE(targets.insert(e.spec.target_key).second);  // one mixture per target
    }
  }
}

TEST_CASE("dataset plan with few speakers") {
  const SplitSizes sizes{10.0, 5.0, 5.0};
  try {
    PlanDataset(SyntheticCorpus(3, 20, 1.0, 2.0, 1), sizes, 1);
    FAIL("three speakers cannot give two disjoint two-talker pools");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kCapacity);
  }
  const DatasetManifest m = PlanDataset(SyntheticCorpus(4, 20, 1.0, 2.0, 1), sizes, 1);
  CHECK(m.speaker_partition.at(Split::kTest).size() == 2);
  CHECK(m.speaker_partition.at(Split::kTrain).size() == 2);
}

TEST_CASE("dataset plan capacity error reports the accounting") {
  const Corpus tiny = SyntheticCorpus(6, 2, 2.0, 3.0, 1);
  try {
    PlanDataset(tiny, SplitSizes{}, 1);
    FAIL("20 h from a tiny corpus accepted");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kCapacity);
    CHECK(std::string(e.what()).find("speakers") != std::string::npos);
  }
}

TEST_CASE("planned SIR values look uniform on [0, 5)") {
  const Corpus corpus = SyntheticCorpus(20, 1200, 2.0, 4.0, 3);
  const DatasetManifest m = PlanDataset(corpus, SplitSizes{40000.0, 4000.0, 4000.0}, 9);
  REQUIRE(m.entries.size() >= 10000);
  double sum = 0, lo = 5, hi = 0;
  for (const ManifestEntry &e : m.entries) {
    sum += e.spec.sir_db;
    lo = std::min(lo, e.spec.sir_db);
    hi = std::max(hi, e.spec.sir_db);
  }
  const double mean = sum / m.entries.size();
  CHECK(mean >= 2.3);
  CHECK(mean <= 2.7);
  CHECK(lo >= 0.0);
  CHECK(hi <= 5.0);
}

TEST_CASE("generate_dataset is deterministic and round-trips the manifest") {
  const Corpus corpus = SyntheticCorpus(6, 6, 1.0, 1.5, 4);
  const SplitSizes sizes{6.0, 3.0, 3.0};
  oracle::TempDir a("gen_a"), b("gen_b");
  const DatasetManifest ma = GenerateDataset(corpus, sizes, 11, a.path());
  GenerateDataset(corpus, sizes, 11, b.path());
  CHECK(Slurp(a.path() / kManifestFile) == Slurp(b.path() / kManifestFile));
  CHECK(Slurp(a.path() / kSpeakersFile) == Slurp(b.path() / kSpeakersFile));
  for (const ManifestEntry &e : ma.entries) {
    CHECK(Slurp(a.path() / e.mix_path) == Slurp(b.path() / e.mix_path));
    const AudioClip clip = ReadWav(a.path() / e.mix_path);
    CHECK(ReadLabels(a.path() / e.label_path).size() == FrameGrid{}.NumFrames(clip.size()));
  }
  const DatasetManifest back = ReadManifest(a.path());
  REQUIRE(back.entries.size() == ma.entries.size());
  for (std::size_t k = 0; k < back.entries.size(); ++k) {
    CHECK(back.entries[k].mix_path == ma.entries[k].mix_path);
    CHECK(back.entries[k].spec.sir_db == ma.entries[k].spec.sir_db);
    CHECK(back.entries[k].spec.seed == ma.entries[k].spec.seed);
    CHECK(back.entries[k].rescale_factor == ma.entries[k].rescale_factor);
  }
  CHECK(back.speaker_partition == ma.speaker_partition);
  const std::string first = Slurp(a.path() / kManifestFile).substr(0, 40);
  CHECK(first.rfind("{\"mix_path\":", 0) == 0);
}
