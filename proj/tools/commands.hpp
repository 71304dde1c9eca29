// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_TOOLS_COMMANDS_HPP_
#define ASTOI_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <string>

namespace astoi::tools {

struct SynthDataOptions {
  std::string manifest;
  double pseudo_minutes = 24.0;
  double utterance_s = 4.0;
  std::string noise;
  std::string snr_range = "-5:10";
  std::uint64_t seed = 1;
  std::string out;
  double validation_fraction = 0.1;
  double test_fraction = 0.1;
};
int RunSynthData(const SynthDataOptions& o);

struct TrainOptions {
  std::string data;
  std::string objective;
  std::string band = "all";
  std::string config;
  std::string out;
};
int RunTrain(const TrainOptions& o);

struct TrainBaselineOptions {
  std::string data;
  int hidden = 512;
  std::string config;
  std::string out;
};
int RunTrainBaseline(const TrainBaselineOptions& o);

struct EnhanceOptions {
  std::string model;
  std::string in;
  std::string out;
};
int RunEnhance(const EnhanceOptions& o);

struct EvaluateOptions {
  std::string model;
  std::string testset;
  std::string snrs = "-5,0,5";
  std::string format = "text";
  std::uint64_t seed = 1;
};
int RunEvaluate(const EvaluateOptions& o);

struct GainCorrOptions {
  std::string model_a;
  std::string model_b;
  std::string testset;
  double snr_db = 0.0;
  std::uint64_t seed = 1;
};
int RunGainCorr(const GainCorrOptions& o);

int RunVerify(std::uint64_t seed);

}  // namespace astoi::tools

#endif  // ASTOI_TOOLS_COMMANDS_HPP_
