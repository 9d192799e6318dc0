// tests/cli_test.cc

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

#include <sys/wait.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "oracles.h"
#include "ovd/cli.h"

using namespace ovd;
namespace fs = std::filesystem;

namespace {

int Run(const std::string &args, const fs::path &log) {
  const std::string cmd =
      std::string(OVD_BINARY) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path &path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> Lines(const fs::path &path) {
  std::ifstream is(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig d = ParseRunConfig("{}");
  CHECK(d.corpus == "synthetic");
  CHECK(d.feature == FeatureKind::kPykno);
  CHECK(d.grid.frame_len == 200);
  CHECK(d.grid.hop == 80);
  CHECK(d.train.batch_size == 32);
  CHECK(d.train.learning_rate == 0.001);
  CHECK(d.train.epochs == 200);

  const RunConfig c = ParseRunConfig(R"({"feature": "mfcc", "seed": 9, "out": "x",
      "split_minutes": {"train": 3, "dev": 0.5},
      "synthetic": {"speakers": 6}, "train": {"epochs": 4, "learning_rate": 0.1},
      "threshold": 0.25})");
  CHECK(c.feature == FeatureKind::kMfcc);
  CHECK(c.seed == 9);
  CHECK(c.out == "x");
  CHECK(c.sizes.train_seconds == 180.0);
  CHECK(c.sizes.dev_seconds == 30.0);
  CHECK(c.sizes.test_seconds == d.sizes.test_seconds);
  CHECK(c.synthetic.speakers == 6);
  CHECK(c.train.epochs == 4);
  CHECK(c.train.learning_rate == 0.1);
  CHECK(c.threshold == 0.25);
  CHECK_NOTHROW(c.Validate());

  CHECK(CodeOf([] { ParseRunConfig("{"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseRunConfig("[]"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseRunConfig(R"({"epochs": 3})"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseRunConfig(R"({"train": {"epoch": 3}})"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseRunConfig(R"({"seed": -1})"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseRunConfig(R"({"seed": "1"})"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseRunConfig(R"({"hop": 1.5})"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseRunConfig(R"({"feature": "plp"})"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { LoadRunConfig("/nonexistent/cfg.json"); }) == ErrorCode::kConfig);
}

TEST_CASE("config validation") {
  auto bad = [](const char *text) {
    return CodeOf([&] { ParseRunConfig(text).Validate(); });
  };
  CHECK(bad(R"({"synthetic": {"speakers": 2}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"threshold": 1.5})") == ErrorCode::kConfig);
  CHECK(bad(R"({"hop": 300})") == ErrorCode::kConfig);
  CHECK(bad(R"({"frame_len": 600, "hop": 80})") == ErrorCode::kConfig);
  CHECK(bad(R"({"corpus": "/nonexistent/corpus"})") == ErrorCode::kConfig);
  CHECK(bad(R"({"train": {"lr_factor": 2}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"vad_threshold_db": 3})") == ErrorCode::kConfig);
  CHECK(bad(R"({"synthetic": {"min_seconds": 3, "max_seconds": 2}})") == ErrorCode::kConfig);
}

TEST_CASE("minutes and exit codes") {
  const SplitSizes s = ParseMinutes("2/1/0.5");
  CHECK(s.train_seconds == 120.0);
  CHECK(s.dev_seconds == 60.0);
  CHECK(s.test_seconds == 30.0);
  for (const char *bad : {"2/1", "2/1/1/1", "a/1/1", "-1/1/1", "1x/1/1", ""})
    CHECK(CodeOf([&] { ParseMinutes(bad); }) == ErrorCode::kConfig);

  CHECK(ExitCodeFor(ErrorCode::kConfig) == 2);
  CHECK(ExitCodeFor(ErrorCode::kCompatibility) == 4);
  CHECK(ExitCodeFor(ErrorCode::kChecksum) == 4);
  CHECK(ExitCodeFor(ErrorCode::kData) == 3);
  CHECK(ExitCodeFor(ErrorCode::kCapacity) == 3);
  CHECK(ExitCodeFor(ErrorCode::kIo) == 3);
}

TEST_CASE("end to end through the binary") {
  oracle::TempDir dir("cli");
  const fs::path a = dir.path() / "a", b = dir.path() / "b", log = dir.path() / "log";
  const std::string synth = "synth --mode synthetic --minutes 0.5/0.25/0.25 --seed 7 --out ";

  REQUIRE(Run(synth + a.string(), log) == 0);
  REQUIRE(Run(synth + b.string(), log) == 0);
  CHECK(Slurp(a / kManifestFile) == Slurp(b / kManifestFile));
  CHECK(Slurp(a / kSpeakersFile) == Slurp(b / kSpeakersFile));

  const DatasetManifest m = ReadManifest(a);
  std::map<Split, int> per_split;
  for (const auto &e : m.entries) ++per_split[e.split];
  CHECK(per_split.size() == 3);
  std::set<std::string> test_spk(m.speaker_partition.at(Split::kTest).begin(),
                                 m.speaker_partition.at(Split::kTest).end());
  CHECK(!test_spk.empty());
  for (Split s : {Split::kTrain, Split::kDev})
    for (const auto &spk : m.speaker_partition.at(s)) CHECK(!test_spk.count(spk));

  RunConfig cfg;
  cfg.out = a;
  cfg.feature = FeatureKind::kMfcc;
  SUBCASE("pipeline") {
    REQUIRE(Run("featurize --feature mfcc --out " + a.string(), log) == 0);
    std::vector<FeatureMatrix> train_feats;
    for (const auto &e : m.entries) {
      const FeatureMatrix fm = ReadFeatures(FeaturePath(cfg, e));
      CHECK(fm.dim() == 39);
      CHECK(fm.frames() == Lines(a / e.label_path).size());
      if (e.split == Split::kTrain) train_feats.push_back(fm);
    }
    const Normalizer saved = LoadNormalizer(NormalizerPath(cfg));
    const Normalizer fit = FitNormalizer(train_feats);
    CHECK((saved.mean - fit.mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((saved.stddev - fit.stddev).cwiseAbs().maxCoeff() < 1e-12);

    const std::string train = "train --feature mfcc --seed 7 --out " + a.string();
    REQUIRE(Run(train + " --epochs 2", log) == 0);
    auto rows = Lines(ModelDir(cfg) / "loss.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "epoch,train_loss,dev_loss,lr");
    CHECK(rows[1].rfind("1,", 0) == 0);
    CHECK(rows[2].rfind("2,", 0) == 0);
    CHECK(fs::exists(ModelDir(cfg) / "best.ckpt"));
    CHECK(fs::exists(ModelDir(cfg) / "train_summary.txt"));

    REQUIRE(Run(train + " --epochs 3 --resume", log) == 0);
    rows = Lines(ModelDir(cfg) / "loss.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[3].rfind("3,", 0) == 0);

    REQUIRE(Run("eval --feature mfcc --out " + a.string(), log) == 0);
    std::map<std::string, std::string> report;
    for (const auto &line : Lines(EvalDir(cfg) / "report.txt")) {
      const auto sp = line.find('=');
      if (sp != std::string::npos) report[line.substr(0, sp)] = line.substr(sp + 1);
    }
    for (const char *key : {"feature", "threshold", "frames", "tp", "fp", "fn", "tn",
                            "accuracy", "precision", "recall", "fscore", "auc",
                            "average_precision", "time_per_epoch_s"})
      CHECK_MESSAGE(report.count(key), key);
    CHECK(report["feature"] == "mfcc");
    const auto roc = Lines(EvalDir(cfg) / "roc.csv");
    REQUIRE(roc.size() >= 4);
    CHECK(roc[0] == "# roc");
    CHECK(Lines(EvalDir(cfg) / "pr.csv")[0] == "# pr");

    // Featurizing another run directory yields identical bytes.
    REQUIRE(Run("featurize --feature mfcc --out " + b.string(), log) == 0);
    RunConfig cb = cfg;
    cb.out = b;
    CHECK(Slurp(FeaturePath(cfg, m.entries[0])) == Slurp(FeaturePath(cb, m.entries[0])));

    // A corrupted checkpoint is a compatibility-class failure.
    {
      std::string bytes = Slurp(ModelDir(cfg) / "best.ckpt");
      bytes[bytes.size() / 2] ^= 0x01;
      std::ofstream(ModelDir(cfg) / "best.ckpt", std::ios::binary) << bytes;
    }
    CHECK(Run("eval --feature mfcc --out " + a.string(), log) == 4);
  }
  SUBCASE("failures") {
    CHECK(Run("", log) == 2);
    CHECK(Run("bogus", log) == 2);
    CHECK(Run("train --feature plp --out " + a.string(), log) == 2);
    CHECK(Run("synth --minutes 1/1 --out " + a.string(), log) == 2);
    CHECK(Run("eval --threshold 2 --out " + a.string(), log) == 2);
    CHECK(Run("synth --config " + (dir.path() / "missing.json").string(), log) == 2);
    CHECK(Run("--help", log) == 0);

    // Missing manifest and missing features are data errors.
    CHECK(Run("featurize --out " + (dir.path() / "empty").string(), log) == 3);
    CHECK(Run("train --feature mfb --out " + a.string(), log) == 3);

    // A deleted mixture is reported by name.
    fs::remove(b / m.entries[1].mix_path);
    CHECK(Run("featurize --feature mfcc --out " + b.string(), log) == 3);
    CHECK(Slurp(log).find(m.entries[1].mix_path) != std::string::npos);

    // Hours of mixtures from a handful of short utterances.
    std::ofstream(dir.path() / "cap.json")
        << R"({"synthetic": {"speakers": 4, "utterances_per_speaker": 2}})";
    CHECK(Run("synth --minutes 600/1/1 --config " + (dir.path() / "cap.json").string() +
                  " --out " + (dir.path() / "cap").string(),
              log) == 3);
    CHECK(Slurp(log).find("capacity") != std::string::npos);
  }
}
