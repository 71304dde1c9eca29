// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_DATASET_HPP_
#define ASTOI_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "astoi/mixing.hpp"
#include "astoi/neural.hpp"
#include "astoi/octave.hpp"
#include "astoi/signal.hpp"
#include "astoi/stft.hpp"

namespace astoi {

enum class Split { kTrain, kValidation, kTest };

std::string SplitName(Split split);

/// How one utterance is mixed.
struct MixSpec {
  double snr_db = 0.0;
  std::string noise_source;
  Split split = Split::kTrain;
  std::uint64_t seed = 0;  // drives the noise segment choice
};

/// How a whole split is mixed. Train and validation draw SNRs uniformly
/// from [snr_min_db, snr_max_db]; test cycles through test_snrs_db.
struct SplitSpec {
  Split split = Split::kTrain;
  double snr_min_db = -5.0;
  double snr_max_db = 10.0;
  std::vector<double> test_snrs_db;
  std::string noise_source = "ssn";
  std::uint64_t seed = 1;
};

/// One MixSpec per utterance, derived from (spec.seed, utterance index) only.
std::vector<MixSpec> DrawMixSpecs(std::size_t count, const SplitSpec& spec);

struct MixedUtterance {
  TimeSignal clean;
  TimeSignal noisy;
  TimeSignal noise;  // scaled noise actually added
  MixSpec mix;
};

std::vector<MixedUtterance> MixUtterances(std::span<const TimeSignal> speech, const TimeSignal& noise,
                                          const SplitSpec& spec);

/// Clean and noisy band envelopes of one utterance (J x M each).
struct UtteranceEnvelopes {
  EnvelopeMatrix clean;
  EnvelopeMatrix noisy;
  double snr_db = 0.0;
};

/// Per-dimension input normalization, estimated on the training split.
struct FeatureNorm {
  Vector mean;
  Vector stddev;

  bool empty() const noexcept { return mean.size() == 0; }
  friend bool operator==(const FeatureNorm&, const FeatureNorm&) = default;
};

/// Network input at frame m: log(1 + Y_j(m - N + 1 + i)) for every band j and
/// lag i, band-major (index j * N + i). Writes bands * N values.
void EnvelopeFeatures(const EnvelopeMatrix& noisy, int frame, int envelope_len, double* out);

/// Normalized copy of a raw feature vector; identity when norm is empty.
void NormalizeFeatures(const FeatureNorm& norm, double* features, Eigen::Index dim);

/// One training pair for band j at frame m.
struct DatasetSample {
  Vector noisy_input;
  EnvelopeVector clean_envelope;
  EnvelopeVector noisy_envelope;
  int band = 0;
};

/// Envelope matrices of a set of utterances plus an index of every frame
/// with N frames of context. Sample order is utterance, then frame, then band.
class EnvelopeCorpus {
 public:
  explicit EnvelopeCorpus(int envelope_len = kEnvelopeLen) : envelope_len_(envelope_len) {}

  void Add(UtteranceEnvelopes utterance);

  int envelope_len() const noexcept { return envelope_len_; }
  int num_bands() const noexcept;
  const std::vector<UtteranceEnvelopes>& utterances() const noexcept { return utterances_; }

  /// Frames (across utterances) that end a full envelope window.
  std::size_t num_windows() const noexcept { return windows_.size(); }
  /// (utterance index, frame index) of window i.
  std::pair<std::size_t, int> Window(std::size_t i) const { return windows_.at(i); }

  std::size_t num_samples() const noexcept { return windows_.size() * static_cast<std::size_t>(num_bands()); }
  DatasetSample Sample(std::size_t i, const FeatureNorm& norm = {}) const;

 private:
  int envelope_len_;
  std::vector<UtteranceEnvelopes> utterances_;
  std::vector<std::pair<std::size_t, int>> windows_;
};

/// Mean and standard deviation of the raw features over every window.
/// Standard deviations below 1e-8 are replaced by 1.
FeatureNorm ComputeFeatureNorm(const EnvelopeCorpus& corpus);

EnvelopeCorpus CorpusFromMixtures(std::span<const MixedUtterance> mixtures, const BandLayout& layout,
                                  const StftConfig& stft = {}, int envelope_len = kEnvelopeLen);

/// Mix every utterance per `spec`, analyse clean and noisy, and collect
/// their envelopes.
EnvelopeCorpus BuildDataset(std::span<const TimeSignal> speech, const TimeSignal& noise, const SplitSpec& spec,
                            const BandLayout& layout, const StftConfig& stft = {});

/// Training view of a corpus for one band's network (band >= 0) or for a
/// joint network predicting all bands (band == kJointBand).
inline constexpr int kJointBand = -1;

class EnvelopeTrainingData final : public TrainingData {
 public:
  EnvelopeTrainingData(const EnvelopeCorpus& corpus, FeatureNorm norm, int band);

  std::size_t size() const override { return corpus_->num_windows(); }
  int input_dim() const override { return corpus_->num_bands() * corpus_->envelope_len(); }
  int target_dim() const override;
  void Gather(std::span<const std::size_t> indices, Matrix& inputs, Matrix& clean,
              Matrix& noisy) const override;

 private:
  const EnvelopeCorpus* corpus_;  // not owned; must outlive this view
  FeatureNorm norm_;
  int band_;
  std::vector<Matrix> log_noisy_;  // log(1 + Y) per utterance
};

/// "ASTOD" pack of an EnvelopeCorpus (same header and CRC as model files).
void SaveCorpus(const EnvelopeCorpus& corpus, const std::filesystem::path& path);
EnvelopeCorpus LoadCorpus(const std::filesystem::path& path);

void SaveFeatureNorm(const FeatureNorm& norm, const std::filesystem::path& path);
FeatureNorm LoadFeatureNorm(const std::filesystem::path& path);

/// Pseudo-speech utterances totalling about `minutes`; each lasts
/// utterance_s scaled by a seeded factor in [0.75, 1.25].
std::vector<TimeSignal> SynthPseudoCorpus(double minutes, double utterance_s, std::uint64_t seed);

struct UtteranceSplit {
  std::vector<TimeSignal> train;
  std::vector<TimeSignal> validation;
  std::vector<TimeSignal> test;
};

/// Seeded shuffle, then the first round(test_fraction * n) utterances go to
/// test and the next round(validation_fraction * n) to validation (at
/// least one each when n >= 3).
UtteranceSplit SplitUtterances(std::vector<TimeSignal> utterances, double validation_fraction,
                               double test_fraction, std::uint64_t seed);

/// Synthesizes "ssn" or "babble" noise from `reference` speech and cuts it
/// into disjoint train / validation / test segments of the given lengths.
NoiseSplit SynthNoiseSplit(const std::string& kind, std::span<const TimeSignal> reference, double train_s,
                           double validation_s, double test_s, std::uint64_t seed, int babble_speakers = 6);

/// Total duration in seconds.
double TotalSeconds(std::span<const TimeSignal> signals);

/// One WAV path per line; blank lines and '#' comments are skipped.
/// Relative paths resolve against the manifest's directory.
std::vector<std::filesystem::path> ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path, std::span<const std::filesystem::path> entries);

}  // namespace astoi

#endif  // ASTOI_DATASET_HPP_
