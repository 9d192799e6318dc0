// cli/commands.cc

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
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ovd/cli.h"
#include "ovd/metrics.h"

namespace ovd {

namespace fs = std::filesystem;

namespace {

constexpr const char *kBestCheckpoint = "best.ckpt";
constexpr const char *kLastCheckpoint = "last.ckpt";
constexpr const char *kLossTrace = "loss.csv";
constexpr const char *kTrainSummary = "train_summary.txt";

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string FormatMetric(const std::optional<double> &v) {
  if (!v) return "undefined";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

Corpus OpenCorpus(const RunConfig &config) {
  if (!config.synthetic_corpus()) return WavCorpus(config.corpus);
  const SyntheticCorpusConfig &s = config.synthetic;
  int per_speaker = s.utterances_per_speaker;
  if (per_speaker == 0) {
    const double total = config.sizes.train_seconds + config.sizes.dev_seconds +
                         config.sizes.test_seconds;
    const double mean_len = 0.5 * (s.min_seconds + s.max_seconds);
    per_speaker = std::max(
        4, static_cast<int>(std::ceil(2.0 * total / (s.speakers * mean_len))) + 2);
  }
  return SyntheticCorpus(s.speakers, per_speaker, s.min_seconds, s.max_seconds,
                         DeriveSeed(config.seed, "corpus"));
}

Normalizer LoadMatchingNormalizer(const RunConfig &config) {
  Normalizer norm = LoadNormalizer(NormalizerPath(config));
  if (norm.kind != config.feature)
    throw Error(ErrorCode::kCompatibility, "normalizer was fit on " +
                                               std::string(FeatureName(norm.kind)) +
                                               " features");
  return norm;
}

void WriteTraceHeader(const fs::path &path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  os << "epoch,train_loss,dev_loss,lr\n";
}

void AppendTraceRow(const fs::path &path, const EpochRecord &rec) {
  std::ofstream os(path, std::ios::app);
  if (!os) throw Error(ErrorCode::kIo, "cannot append to " + path.string());
  os << rec.epoch << ',' << FormatDouble(rec.train_loss) << ','
     << FormatDouble(rec.dev_loss) << ',' << FormatDouble(rec.lr) << '\n';
}

CheckpointInfo InfoFrom(const TrainState &state) {
  CheckpointInfo info;
  info.epochs_done = state.epochs_done;
  info.learning_rate = state.scheduler.lr();
  info.scheduler_best = state.scheduler.best();
  info.scheduler_misses = state.scheduler.misses();
  info.best_dev_loss = state.best_dev_loss;
  return info;
}

}  // namespace

fs::path FeaturePath(const RunConfig &config, const ManifestEntry &entry) {
  fs::path rel = entry.mix_path;
  if (rel.begin() != rel.end() && *rel.begin() == "audio")
    rel = rel.lexically_relative("audio");
  rel.replace_extension(".ftr");
  return config.out / "features" / FeatureName(config.feature) / rel;
}

fs::path NormalizerPath(const RunConfig &config) {
  return config.out / "features" / FeatureName(config.feature) / "normalizer.json";
}

fs::path ModelDir(const RunConfig &config) {
  return config.out / "models" / FeatureName(config.feature);
}

fs::path EvalDir(const RunConfig &config) {
  return config.out / "eval" / FeatureName(config.feature);
}

LabeledFrames LoadSplit(const RunConfig &config, const DatasetManifest &manifest,
                        Split split, const Normalizer &norm) {
  std::vector<Matrix> parts;
  LabeledFrames out;
  Eigen::Index rows = 0;
  for (const ManifestEntry &e : manifest.entries) {
    if (e.split != split) continue;
    const FeatureMatrix fm = ReadFeatures(FeaturePath(config, e));
    if (fm.kind != config.feature)
      throw Error(ErrorCode::kCompatibility, "unexpected feature kind in " +
                                                 FeaturePath(config, e).string());
    const std::vector<FrameLabel> labels = ReadLabels(config.out / e.label_path);
    if (static_cast<std::size_t>(fm.frames()) != labels.size())
      throw Error(ErrorCode::kData, e.mix_path + ": " + std::to_string(fm.frames()) +
                                        " feature frames vs " +
                                        std::to_string(labels.size()) + " labels");
    for (FrameLabel l : labels) out.labels.push_back(l == FrameLabel::kOverlap ? 1.0 : 0.0);
    rows += fm.frames();
    parts.push_back(norm.Apply(fm.data));
  }
  out.features.resize(rows, FeatureDim(config.feature));
  Eigen::Index r = 0;
  for (const Matrix &m : parts) {
    out.features.middleRows(r, m.rows()) = m;
    r += m.rows();
  }
  return out;
}

void CmdSynth(const RunConfig &config) {
  config.Validate();
  const Corpus corpus = OpenCorpus(config);
  const DatasetManifest manifest =
      GenerateDataset(corpus, config.sizes, DeriveSeed(config.seed, "mixing"),
                      config.out, config.grid, config.vad_threshold_db);
  std::size_t counts[3] = {0, 0, 0};
  for (const ManifestEntry &e : manifest.entries) ++counts[static_cast<int>(e.split)];
  std::cerr << "synth: " << manifest.entries.size() << " mixtures (train "
            << counts[0] << ", dev " << counts[1] << ", test " << counts[2]
            << ") written to " << config.out.string() << "\n";
}

void CmdFeaturize(const RunConfig &config) {
  config.Validate();
  const DatasetManifest manifest = ReadManifest(config.out);
  NormalizerAccumulator acc(config.feature);
  std::vector<std::string> failures;
  for (const ManifestEntry &e : manifest.entries) {
    try {
      const AudioClip clip = ReadWav(config.out / e.mix_path);
      const FeatureMatrix fm = ExtractFeatures(config.feature, clip, config.grid);
      const std::vector<FrameLabel> labels = ReadLabels(config.out / e.label_path);
      if (static_cast<std::size_t>(fm.frames()) != labels.size())
        throw Error(ErrorCode::kData, std::to_string(fm.frames()) +
                                          " frames but " + std::to_string(labels.size()) +
                                          " labels");
      const fs::path path = FeaturePath(config, e);
      fs::create_directories(path.parent_path());
      WriteFeatures(fm, path);
      // float32, as stored.
      if (e.split == Split::kTrain)
        acc.Add({fm.kind, fm.data.cast<float>().cast<double>()});
    } catch (const Error &err) {
      failures.push_back(e.mix_path + ": " + err.what());
    }
  }
  for (const std::string &f : failures) std::cerr << "featurize: " << f << "\n";
  if (!failures.empty())
    throw Error(ErrorCode::kData,
                std::to_string(failures.size()) + " file(s) failed to featurize");
  SaveNormalizer(acc.Finish(), NormalizerPath(config));
  std::cerr << "featurize: " << manifest.entries.size() << " files of "
            << FeatureName(config.feature) << " features\n";
}

void CmdTrain(const RunConfig &config, bool resume) {
  config.Validate();
  const DatasetManifest manifest = ReadManifest(config.out);
  const Normalizer norm = LoadMatchingNormalizer(config);
  const LabeledFrames train = LoadSplit(config, manifest, Split::kTrain, norm);
  const LabeledFrames dev = LoadSplit(config, manifest, Split::kDev, norm);

  const fs::path dir = ModelDir(config);
  fs::create_directories(dir);
  const int dim = FeatureDim(config.feature);
  TrainConfig tc = config.train;
  tc.seed = DeriveSeed(config.seed, "shuffle");

  TrainState state;
  if (resume) {
    CheckpointInfo info;
    Model model = LoadCheckpoint(dir / kLastCheckpoint, config.feature, dim, &info);
    state = InitTrainState(model, tc);
    state.epochs_done = info.epochs_done;
    state.scheduler.Restore(info.learning_rate, info.scheduler_best, info.scheduler_misses);
    state.best_dev_loss = info.best_dev_loss;
    if (fs::exists(dir / kBestCheckpoint))
      state.best_model = LoadCheckpoint(dir / kBestCheckpoint, config.feature, dim);
    if (!fs::exists(dir / kLossTrace)) WriteTraceHeader(dir / kLossTrace);
    std::cerr << "train: resuming after epoch " << state.epochs_done << "\n";
  } else {
    state = InitTrainState(
        MakeModel(kDefaultChannels, config.feature, dim, DeriveSeed(config.seed, "init")),
        tc);
    WriteTraceHeader(dir / kLossTrace);
    SaveCheckpoint(state.best_model, InfoFrom(state), dir / kBestCheckpoint);
    SaveCheckpoint(state.model, InfoFrom(state), dir / kLastCheckpoint);
  }
  std::cerr << "train: " << train.size() << " train frames, " << dev.size()
            << " dev frames, " << FeatureName(config.feature) << " dim " << dim << "\n";

  double best_seen = state.best_dev_loss;
  const auto trace = Train(&state, train, dev, tc,
                           [&](const EpochRecord &rec, const TrainState &s) {
    AppendTraceRow(dir / kLossTrace, rec);
    if (s.best_dev_loss < best_seen) {
      best_seen = s.best_dev_loss;
      SaveCheckpoint(s.best_model, InfoFrom(s), dir / kBestCheckpoint);
    }
    SaveCheckpoint(s.model, InfoFrom(s), dir / kLastCheckpoint);
    std::fprintf(stderr, "epoch %d  train %.6f  dev %.6f  lr %g  %.2fs\n", rec.epoch,
                 rec.train_loss, rec.dev_loss, rec.lr, rec.seconds);
  });

  double seconds = 0.0;
  for (const EpochRecord &r : trace) seconds += r.seconds;
  std::ofstream summary(dir / kTrainSummary);
  summary << "epochs=" << state.epochs_done << "\n"
          << "epochs_this_run=" << trace.size() << "\n"
          << "mean_epoch_seconds="
          << FormatDouble(trace.empty() ? 0.0 : seconds / trace.size()) << "\n"
          << "best_dev_loss=" << FormatDouble(state.best_dev_loss) << "\n";
}

int CmdEval(const RunConfig &config) {
  config.Validate();
  const DatasetManifest manifest = ReadManifest(config.out);
  const Normalizer norm = LoadMatchingNormalizer(config);
  const Model model = LoadCheckpoint(ModelDir(config) / kBestCheckpoint, config.feature,
                                     FeatureDim(config.feature));
  const LabeledFrames test = LoadSplit(config, manifest, Split::kTest, norm);
  if (test.size() == 0) throw Error(ErrorCode::kData, "test split has no frames");

  const Prediction pred = Predict(model, test.features, config.threshold);
  std::vector<FrameLabel> truth;
  truth.reserve(test.size());
  for (double y : test.labels)
    truth.push_back(y > 0.5 ? FrameLabel::kOverlap : FrameLabel::kSingle);
  const ConfusionMatrix cm = Confusion(pred.labels, truth);

  const fs::path dir = EvalDir(config);
  fs::create_directories(dir);
  std::ostringstream report;
  report << "feature=" << FeatureName(config.feature) << "\n"
         << "threshold=" << config.threshold << "\n"
         << "frames=" << cm.total() << "\n"
         << "tp=" << cm.tp << "\nfp=" << cm.fp << "\nfn=" << cm.fn << "\ntn=" << cm.tn
         << "\n"
         << "accuracy=" << FormatMetric(Accuracy(cm)) << "\n"
         << "precision=" << FormatMetric(Precision(cm)) << "\n"
         << "recall=" << FormatMetric(Recall(cm)) << "\n"
         << "fscore=" << FormatMetric(FScore(cm)) << "\n";

  int status = 0;
  try {
    const auto roc = RocCurve(pred.prob, truth);
    WriteCurveCsv(roc, CurveKind::kRoc, dir / "roc.csv");
    report << "auc=" << FormatMetric(Auc(roc)) << "\n";
  } catch (const Error &e) {
    std::cerr << "eval: ROC undefined: " << e.what() << "\n";
    report << "auc=undefined\n";
    status = ExitCodeFor(e.code());
  }
  try {
    const auto pr = PrCurve(pred.prob, truth);
    WriteCurveCsv(pr, CurveKind::kPr, dir / "pr.csv");
    report << "average_precision=" << FormatMetric(AveragePrecision(pr)) << "\n";
  } catch (const Error &e) {
    std::cerr << "eval: PR undefined: " << e.what() << "\n";
    report << "average_precision=undefined\n";
    status = ExitCodeFor(e.code());
  }

  std::ifstream summary(ModelDir(config) / kTrainSummary);
  std::string line;
  while (std::getline(summary, line))
    if (line.rfind("mean_epoch_seconds=", 0) == 0)
      report << "time_per_epoch_s=" << line.substr(line.find('=') + 1) << "\n";

  std::ofstream os(dir / "report.txt");
  if (!os) throw Error(ErrorCode::kIo, "cannot write eval report");
  os << report.str();
  std::cout << report.str();
  return status;
}

}  // namespace ovd
