// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_BASELINE_HPP_
#define ASTOI_BASELINE_HPP_

// Classical short-time spectral amplitude (STSA) enhancer: one network maps
// a context of noisy log-magnitude frames to sigmoid gains for the last few
// STFT frames and is trained on the MSE between gained noisy and clean
// magnitudes. Overlapping frame estimates are averaged.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "astoi/dataset.hpp"
#include "astoi/neural.hpp"
#include "astoi/signal.hpp"
#include "astoi/stft.hpp"

namespace astoi {

struct StsaSystem {
  MlpModel model;
  StftConfig stft_config;
  FeatureNorm feature_norm;
  int context_frames = 30;
  int output_frames = 5;
};

/// Clean and noisy magnitudes (frames x bins) of a set of utterances.
struct StsaCorpus {
  std::vector<Matrix> clean;
  std::vector<Matrix> noisy;
};

StsaCorpus StsaCorpusFromPairs(std::span<const TimeSignal> clean, std::span<const TimeSignal> noisy,
                               const StftConfig& stft = {});

/// Input at step m: log(1 + |Y|) of frames m - context + 1 .. m, frame-major,
/// with frames before the utterance start set to zero.
void StsaFeatures(const Matrix& log_noisy, int step, int context_frames, double* out);

/// Steps run from output_frames - 1 to M - 1; step m estimates frames
/// m - output_frames + 1 .. m. Returns how many estimates land on each frame.
std::vector<int> StsaCoverage(int num_frames, int output_frames);

/// Training view: one sample per step of every utterance.
class StsaTrainingData final : public TrainingData {
 public:
  StsaTrainingData(const StsaCorpus& corpus, FeatureNorm norm, int context_frames, int output_frames);

  std::size_t size() const override { return steps_.size(); }
  int input_dim() const override { return context_ * bins_; }
  int target_dim() const override { return outputs_ * bins_; }
  void Gather(std::span<const std::size_t> indices, Matrix& inputs, Matrix& clean,
              Matrix& noisy) const override;

 private:
  const StsaCorpus* corpus_;  // not owned
  FeatureNorm norm_;
  int context_;
  int outputs_;
  int bins_;
  std::vector<Matrix> log_noisy_;
  std::vector<std::pair<std::size_t, int>> steps_;
};

FeatureNorm ComputeStsaNorm(const StsaCorpus& corpus, int context_frames, int output_frames);

struct StsaTrainOptions {
  std::vector<int> hidden = {512, 512, 512};
  TrainConfig train = TrainConfig::Defaults(Objective::kSpectralMse);
  int context_frames = 30;
  int output_frames = 5;
};

struct StsaTrainResult {
  StsaSystem system;
  TrainReport report;
};

StsaTrainResult TrainStsa(const StsaCorpus& train, const StsaCorpus& validation, const StsaTrainOptions& options);

/// Per-bin gains (frames x bins) after averaging overlapping estimates.
Matrix StsaGains(const StsaSystem& system, const Spectrogram& noisy);

/// Output length equals input length. Needs at least output_frames frames.
TimeSignal StsaEnhance(const StsaSystem& system, const TimeSignal& noisy);

/// Directory with stsa.cfg, feature_norm.bin and stsa.astoi.
void SaveStsa(const StsaSystem& system, const std::filesystem::path& dir);
StsaSystem LoadStsa(const std::filesystem::path& dir);

}  // namespace astoi

#endif  // ASTOI_BASELINE_HPP_
