// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cstdio>
#include <string>

#include "astoi/config.hpp"
#include "astoi/dataset.hpp"
#include "astoi/mixing.hpp"
#include "astoi/signal_io.hpp"
#include "commands.hpp"
#include "common.hpp"

namespace astoi::tools {

namespace {

// Noise is stored at this RMS so unit-RMS noise does not clip in 16 bits.
constexpr double kStoredNoiseRms = 0.1;

std::string Numbered(const std::string& prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05zu.wav", prefix.c_str(), i);
  return buf;
}

void WriteSplitWavs(const std::filesystem::path& dir, const std::vector<MixedUtterance>& mixes) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> clean, noisy;
  for (std::size_t i = 0; i < mixes.size(); ++i) {
    clean.emplace_back(Numbered("clean", i));
    noisy.emplace_back(Numbered("noisy", i));
    WriteWav(mixes[i].clean, dir / clean.back());
    WriteWav(mixes[i].noisy, dir / noisy.back());
  }
  WriteManifest(dir / "clean.txt", clean);
  WriteManifest(dir / "noisy.txt", noisy);
}

TimeSignal Scaled(TimeSignal s, double gain) {
  for (double& v : s.samples) v *= gain;
  return s;
}

}  // namespace

int RunSynthData(const SynthDataOptions& o) {
  const auto colon = o.snr_range.find(':');
  if (colon == std::string::npos) throw UsageError("--snr-range must look like LO:HI");
  const std::vector<double> lo = ParseDoubleList(o.snr_range.substr(0, colon));
  const std::vector<double> hi = ParseDoubleList(o.snr_range.substr(colon + 1));
  if (lo.size() != 1 || hi.size() != 1 || lo[0] > hi[0]) throw UsageError("--snr-range must look like LO:HI");

  std::vector<TimeSignal> speech;
  if (!o.manifest.empty()) {
    speech = ReadSpeechList(ReadManifest(o.manifest));
    Info("read " + std::to_string(speech.size()) + " utterances");
  } else {
    speech = SynthPseudoCorpus(o.pseudo_minutes, o.utterance_s, o.seed);
    Info("synthesized " + std::to_string(speech.size()) + " pseudo-speech utterances");
  }
  UtteranceSplit split = SplitUtterances(std::move(speech), o.validation_fraction, o.test_fraction, o.seed);

  double longest = 0.0;
  for (const auto* set : {&split.train, &split.validation, &split.test}) {
    for (const TimeSignal& s : *set) longest = std::max(longest, s.duration_s());
  }
  const double train_s = std::max(TotalSeconds(split.train), 2.0 * longest);
  const double val_s = std::max(TotalSeconds(split.validation), 2.0 * longest);
  const double test_s = std::max(TotalSeconds(split.test), 2.0 * longest);

  std::string noise_type = o.noise;
  NoiseSplit noise;
  if (o.noise.rfind("file:", 0) == 0) {
    const std::filesystem::path path = o.noise.substr(5);
    noise_type = path.stem().string();
    const TimeSignal raw = ReadSpeech(path);
    const double total = raw.duration_s();
    const double sum = train_s + val_s + test_s;
    noise = SplitNoise(raw, total * train_s / sum - 0.01, total * val_s / sum - 0.01, total * test_s / sum - 0.01);
  } else if (o.noise == "ssn" || o.noise == "babble") {
    noise = SynthNoiseSplit(o.noise, split.train, train_s, val_s, test_s, o.seed);
  } else {
    throw UsageError("--noise must be ssn, babble or file:PATH");
  }

  const std::filesystem::path out = o.out;
  std::filesystem::create_directories(out / "test");
  const StftConfig stft;
  const BandLayout layout = BuildBandLayout();

  for (const auto& [which, utts, noise_part] :
       {std::tuple{Split::kTrain, &split.train, &noise.train},
        std::tuple{Split::kValidation, &split.validation, &noise.validation}}) {
    SplitSpec spec;
    spec.split = which;
    spec.snr_min_db = lo[0];
    spec.snr_max_db = hi[0];
    spec.noise_source = noise_type;
    spec.seed = o.seed;
    const std::vector<MixedUtterance> mixes = MixUtterances(*utts, *noise_part, spec);
    SaveCorpus(CorpusFromMixtures(mixes, layout, stft), out / (SplitName(which) + ".astod"));
    WriteSplitWavs(out / SplitName(which), mixes);
    Info(SplitName(which) + ": " + std::to_string(mixes.size()) + " mixtures");
  }

  std::vector<std::filesystem::path> test_files;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    test_files.emplace_back(Numbered("clean", i));
    WriteWav(split.test[i], out / "test" / test_files.back());
  }
  WriteManifest(out / "test" / "manifest.txt", test_files);
  WriteWav(Scaled(noise.test, kStoredNoiseRms), out / "test" / ("noise_" + noise_type + ".wav"));
  Info("test: " + std::to_string(split.test.size()) + " clean utterances");

  KeyValues info;
  info["noise"] = noise_type;
  info["snr_min_db"] = std::to_string(lo[0]);
  info["snr_max_db"] = std::to_string(hi[0]);
  info["seed"] = std::to_string(o.seed);
  info["train_utterances"] = std::to_string(split.train.size());
  info["validation_utterances"] = std::to_string(split.validation.size());
  info["test_utterances"] = std::to_string(split.test.size());
  WriteKeyValueFile(info, out / "dataset.cfg");
  return kOk;
}

}  // namespace astoi::tools
