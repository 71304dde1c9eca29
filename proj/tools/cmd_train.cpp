// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cstdio>
#include <string>

#include "astoi/baseline.hpp"
#include "astoi/config.hpp"
#include "astoi/dataset.hpp"
#include "astoi/errors.hpp"
#include "astoi/pipeline.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace astoi::tools {

namespace {

const std::set<std::string> kTrainKeys = {"hidden",  "learning_rate", "lr_decay",   "lr_floor",
                                          "max_epochs", "minibatch",  "seed",       "out_of_band"};
const std::set<std::string> kBaselineKeys = {"hidden_layers", "learning_rate", "lr_decay", "lr_floor",
                                             "max_epochs",    "minibatch",     "seed"};

template <typename F>
auto ConfigValue(const KeyValues& kv, const std::string& key, F get) {
  try {
    return get(kv, key);
  } catch (const FormatError& e) {
    throw UsageError(e.what());
  }
}

void ApplyTrainKeys(const KeyValues& kv, TrainConfig& cfg) {
  if (kv.count("learning_rate")) cfg.initial_lr_per_sample = ConfigValue(kv, "learning_rate", GetDouble);
  if (kv.count("lr_decay")) cfg.lr_decay = ConfigValue(kv, "lr_decay", GetDouble);
  if (kv.count("lr_floor")) cfg.lr_floor = ConfigValue(kv, "lr_floor", GetDouble);
  if (kv.count("max_epochs")) cfg.max_epochs = static_cast<int>(ConfigValue(kv, "max_epochs", GetInt));
  if (kv.count("minibatch")) cfg.minibatch = static_cast<int>(ConfigValue(kv, "minibatch", GetInt));
  if (kv.count("seed")) cfg.seed = static_cast<std::uint64_t>(ConfigValue(kv, "seed", GetInt));
  if (!(cfg.initial_lr_per_sample > 0.0) || !(cfg.lr_decay > 0.0 && cfg.lr_decay < 1.0) || cfg.max_epochs < 0 ||
      cfg.minibatch <= 0) {
    throw UsageError("training settings out of range");
  }
}

void PrintReport(const std::string& what, const TrainReport& report) {
  for (std::size_t e = 0; e < report.epochs.size(); ++e) {
    const EpochStats& s = report.epochs[e];
    std::fprintf(stderr, "%s epoch %zu: train %.6f  validation %.6f  lr %.3g  degenerate %ld\n", what.c_str(),
                 e + 1, s.train_cost, s.validation_cost, s.lr, s.degenerate);
  }
  std::fprintf(stderr, "%s: best epoch %d, stopped by %s\n", what.c_str(), report.best_epoch + 1,
               report.stop_reason == StopReason::kLrFloor ? "learning-rate floor" : "epoch limit");
}

}  // namespace

int RunTrain(const TrainOptions& o) {
  SystemTrainOptions opts;
  opts.objective = ParseObjective(o.objective);
  opts.train = TrainConfig::Defaults(opts.objective);
  try {
    opts.bands = BandSelection::Parse(o.band);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  OutOfBandPolicy policy = OutOfBandPolicy::kZero;
  if (!o.config.empty()) {
    const KeyValues kv = ReadConfig(o.config, kTrainKeys);
    ApplyTrainKeys(kv, opts.train);
    if (kv.count("hidden")) opts.hidden = ParseIntList(kv.at("hidden"));
    if (kv.count("out_of_band")) {
      const std::string p = kv.at("out_of_band");
      if (p == "zero") {
        policy = OutOfBandPolicy::kZero;
      } else if (p == "pass-through") {
        policy = OutOfBandPolicy::kPassThrough;
      } else {
        throw UsageError("out_of_band must be zero or pass-through");
      }
    }
  }

  const std::filesystem::path data = o.data;
  const EnvelopeCorpus train = LoadCorpus(data / "train.astod");
  const EnvelopeCorpus validation = LoadCorpus(data / "validation.astod");
  Info("training on " + std::to_string(train.num_windows()) + " windows, validating on " +
       std::to_string(validation.num_windows()));
  opts.on_band_done = [](int band, const TrainReport& report) {
    PrintReport(band == kJointBand ? std::string("joint") : "band " + std::to_string(band), report);
  };
  SystemTrainResult result = TrainSystem(train, validation, opts);
  result.system.policy = policy;
  SaveSystem(result.system, o.out);
  Info("wrote " + o.out);
  return kOk;
}

int RunTrainBaseline(const TrainBaselineOptions& o) {
  StsaTrainOptions opts;
  int layers = 3;
  if (!o.config.empty()) {
    const KeyValues kv = ReadConfig(o.config, kBaselineKeys);
    ApplyTrainKeys(kv, opts.train);
    if (kv.count("hidden_layers")) layers = static_cast<int>(ConfigValue(kv, "hidden_layers", GetInt));
    if (layers <= 0) throw UsageError("hidden_layers must be positive");
  }
  opts.hidden.assign(static_cast<std::size_t>(layers), o.hidden);

  const std::filesystem::path data = o.data;
  auto load = [&](const std::string& split) {
    const auto clean = ReadSpeechList(ReadManifest(data / split / "clean.txt"));
    const auto noisy = ReadSpeechList(ReadManifest(data / split / "noisy.txt"));
    return StsaCorpusFromPairs(clean, noisy);
  };
  const StsaCorpus train = load("train");
  const StsaCorpus validation = load("validation");
  const StsaTrainResult result = TrainStsa(train, validation, opts);
  PrintReport("baseline", result.report);
  SaveStsa(result.system, o.out);
  Info("wrote " + o.out);
  return kOk;
}

}  // namespace astoi::tools
