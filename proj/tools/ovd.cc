// tools/ovd.cc

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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ovd/cli.h"

namespace {

struct Overrides {
  std::string config;
  std::optional<uint64_t> seed;
  std::string feature;
  std::string out;
  std::optional<double> threshold;
  std::string mode;
  std::string minutes;
  std::optional<int> epochs;
};

void AddCommonFlags(CLI::App *cmd, Overrides *o) {
  cmd->add_option("--config", o->config, "JSON run configuration");
  cmd->add_option("--seed", o->seed, "root seed");
  cmd->add_option("--feature", o->feature, "magspec | mfb | mfcc | pykno");
  cmd->add_option("--out", o->out, "output directory");
}

ovd::RunConfig Resolve(const Overrides &o) {
  ovd::RunConfig c;
  if (!o.config.empty()) c = ovd::LoadRunConfig(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.feature.empty()) {
    const auto kind = ovd::ParseFeatureKind(o.feature);
    if (!kind) throw ovd::Error(ovd::ErrorCode::kConfig, "unknown feature '" + o.feature + "'");
    c.feature = *kind;
  }
  if (!o.out.empty()) c.out = o.out;
  if (o.threshold) c.threshold = *o.threshold;
  if (!o.mode.empty()) c.corpus = o.mode;
  if (!o.minutes.empty()) c.sizes = ovd::ParseMinutes(o.minutes);
  if (o.epochs) c.train.epochs = *o.epochs;
  c.Validate();
  return c;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Overlapped speech detection toolkit"};
  app.require_subcommand(1);
  Overrides o;
  bool resume = false;

  CLI::App *synth = app.add_subcommand("synth", "build mixtures, labels and manifest");
  AddCommonFlags(synth, &o);
  synth->add_option("--mode,--corpus", o.mode, "'synthetic' or a <speaker>/<utt>.wav tree");
  synth->add_option("--minutes", o.minutes, "train/dev/test minutes, e.g. 2/1/1");

  CLI::App *featurize = app.add_subcommand("featurize", "extract features and fit the normalizer");
  AddCommonFlags(featurize, &o);

  CLI::App *train = app.add_subcommand("train", "train the frame classifier");
  AddCommonFlags(train, &o);
  train->add_option("--epochs", o.epochs, "total epochs");
  train->add_flag("--resume", resume, "continue from the last checkpoint");

  CLI::App *eval = app.add_subcommand("eval", "score the test split");
  AddCommonFlags(eval, &o);
  eval->add_option("--threshold", o.threshold, "decision threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const ovd::RunConfig config = Resolve(o);
    if (synth->parsed()) {
      ovd::CmdSynth(config);
    } else if (featurize->parsed()) {
      ovd::CmdFeaturize(config);
    } else if (train->parsed()) {
      ovd::CmdTrain(config, resume);
    } else {
      return ovd::CmdEval(config);
    }
  } catch (const ovd::Error &e) {
    std::cerr << "error (" << ovd::ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return ovd::ExitCodeFor(e.code());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
