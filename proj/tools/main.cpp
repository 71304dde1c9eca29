// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// astoi: train and run envelope-correlation speech enhancers.

#include <cstdio>
#include <functional>

#include "CLI11.hpp"
#include "astoi/errors.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace {

using namespace astoi::tools;

int Dispatch(const std::function<int()>& run) {
  try {
    return run();
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const astoi::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kNumericFailure;
  } catch (const astoi::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDataError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDataError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech enhancement by envelope-correlation training"};
  app.require_subcommand(1);
  std::function<int()> action;

  SynthDataOptions sd;
  auto* synth = app.add_subcommand("synth-data", "Build mixed train/validation/test data");
  synth->add_option("--manifest", sd.manifest, "Clean speech WAV list (default: synthetic pseudo-speech)");
  synth->add_option("--pseudo-minutes", sd.pseudo_minutes, "Minutes of pseudo-speech without --manifest");
  synth->add_option("--utterance-seconds", sd.utterance_s, "Mean pseudo-speech utterance length");
  synth->add_option("--noise", sd.noise, "ssn | babble | file:PATH")->required();
  synth->add_option("--snr-range", sd.snr_range, "LO:HI in dB for train/validation mixtures");
  synth->add_option("--seed", sd.seed);
  synth->add_option("--validation-fraction", sd.validation_fraction);
  synth->add_option("--test-fraction", sd.test_fraction);
  synth->add_option("--out", sd.out, "Output directory")->required();
  synth->callback([&] { action = [&] { return RunSynthData(sd); }; });

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train band-gain networks");
  train->add_option("--data", tr.data, "Directory written by synth-data")->required();
  train->add_option("--objective", tr.objective)->required()->check(CLI::IsMember({"elc", "emse"}));
  train->add_option("--band", tr.band, "0..14, all or joint");
  train->add_option("--config", tr.config, "key = value training settings");
  train->add_option("--out", tr.out, "Model directory")->required();
  train->callback([&] { action = [&] { return RunTrain(tr); }; });

  TrainBaselineOptions tb;
  auto* baseline = app.add_subcommand("train-baseline", "Train the STFT-magnitude MSE baseline");
  baseline->add_option("--data", tb.data)->required();
  baseline->add_option("--hidden", tb.hidden)->check(CLI::IsMember({512, 4096}));
  baseline->add_option("--config", tb.config);
  baseline->add_option("--out", tb.out)->required();
  baseline->callback([&] { action = [&] { return RunTrainBaseline(tb); }; });

  EnhanceOptions en;
  auto* enhance = app.add_subcommand("enhance", "Enhance one noisy WAV file");
  enhance->add_option("--model", en.model)->required();
  enhance->add_option("--in", en.in)->required();
  enhance->add_option("--out", en.out)->required();
  enhance->callback([&] { action = [&] { return RunEnhance(en); }; });

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a test set");
  evaluate->add_option("--model", ev.model)->required();
  evaluate->add_option("--testset", ev.testset)->required();
  evaluate->add_option("--snrs", ev.snrs, "Comma-separated SNRs in dB");
  evaluate->add_option("--format", ev.format)->check(CLI::IsMember({"text", "csv"}));
  evaluate->add_option("--seed", ev.seed);
  evaluate->callback([&] { action = [&] { return RunEvaluate(ev); }; });

  GainCorrOptions gc;
  auto* corr = app.add_subcommand("gain-corr", "Correlate the gains of two models");
  corr->add_option("--model-a", gc.model_a)->required();
  corr->add_option("--model-b", gc.model_b)->required();
  corr->add_option("--testset", gc.testset)->required();
  corr->add_option("--snr", gc.snr_db, "Mixing SNR in dB");
  corr->add_option("--seed", gc.seed);
  corr->callback([&] { action = [&] { return RunGainCorr(gc); }; });

  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "Check analytic gradients against finite differences");
  verify->add_option("--seed", verify_seed);
  verify->callback([&] { action = [&] { return RunVerify(verify_seed); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  return Dispatch(action);
}
