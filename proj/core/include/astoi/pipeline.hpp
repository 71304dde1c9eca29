// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_PIPELINE_HPP_
#define ASTOI_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "astoi/dataset.hpp"
#include "astoi/neural.hpp"
#include "astoi/octave.hpp"
#include "astoi/signal.hpp"
#include "astoi/stft.hpp"

namespace astoi {

/// Band-gain estimators plus everything needed to turn a noisy waveform
/// into their inputs and their outputs back into a waveform.
///
/// band_models holds either one model per band (output_dim == N) or a
/// single joint model whose J*N outputs are band-major.
struct EnhancementSystem {
  std::vector<MlpModel> band_models;
  BandLayout layout = BuildBandLayout();
  StftConfig stft_config;
  FeatureNorm feature_norm;
  Objective objective = Objective::kElc;
  OutOfBandPolicy policy = OutOfBandPolicy::kZero;
  int envelope_len = kEnvelopeLen;

  bool joint() const noexcept { return band_models.size() == 1 && layout.num_bands() > 1; }
  /// Throws InvalidArgument if models, layout and normalization disagree.
  void Validate() const;
};

/// Writes system.cfg, feature_norm.bin and band_XX.astoi (or joint.astoi)
/// into `dir`, creating it if needed. Empty entries of band_models (a
/// partially trained system) are skipped, leaving any file on disk alone.
void SaveSystem(const EnhancementSystem& system, const std::filesystem::path& dir);
EnhancementSystem LoadSystem(const std::filesystem::path& dir);

/// Gain vectors of every envelope window, grouped by band: gains[j][w] is
/// the network output for band j at frame N - 1 + w.
std::vector<std::vector<GainVector>> EstimateGainVectors(const EnhancementSystem& system,
                                                         const EnvelopeMatrix& noisy_env);

/// Per-frame band gains (J x M) after averaging overlapping estimates.
Matrix EstimateBandGains(const EnhancementSystem& system, const EnvelopeMatrix& noisy_env);

/// Ideal band gains min(1, X / Y); a band with Y == 0 gets gain 0.
Matrix OracleBandGains(const EnvelopeMatrix& clean_env, const EnvelopeMatrix& noisy_env);

/// Applies J x M band gains uniformly inside each band and resynthesizes
/// with the noisy phase.
TimeSignal EnhanceWithBandGains(const Spectrogram& noisy, const Matrix& band_gains, const BandLayout& layout,
                                OutOfBandPolicy policy = OutOfBandPolicy::kZero);

/// Full path: STFT, envelopes, networks, averaging, gain mapping, overlap-add.
/// Needs at least N frames; output length equals input length.
TimeSignal Enhance(const EnhancementSystem& system, const TimeSignal& noisy);

struct ScoreResult {
  double mean = 0.0;
  long scored = 0;
  long degenerate = 0;
};

/// Mean ELC over all (band, frame) windows of clean versus processed, with
/// degenerate windows skipped and counted. Throws InvalidArgument on a
/// length mismatch and DegenerateInput if no window can be scored.
ScoreResult ScoreElc(const TimeSignal& clean, const TimeSignal& processed, const StftConfig& stft = {},
                     const BandLayout& layout = BuildBandLayout(), int envelope_len = kEnvelopeLen);

/// The clip-free intelligibility score; the same number as ScoreElc.
ScoreResult ScoreApproxStoi(const TimeSignal& clean, const TimeSignal& processed, const StftConfig& stft = {},
                            const BandLayout& layout = BuildBandLayout(), int envelope_len = kEnvelopeLen);

/// Pearson correlation between the gain-vector entries both systems produce
/// on the same noisy inputs. Throws InvalidArgument if the systems use a
/// different layout or STFT, DegenerateInput if either side is constant.
double GainCorrelation(const EnhancementSystem& a, const EnhancementSystem& b,
                       std::span<const TimeSignal> noisy_inputs);

/// Band selection for TrainSystem.
struct BandSelection {
  enum class Kind { kAll, kOne, kJoint } kind = Kind::kAll;
  int band = 0;

  static BandSelection Parse(const std::string& text);
};

struct SystemTrainOptions {
  Objective objective = Objective::kElc;
  std::vector<int> hidden = {512, 512, 512};
  TrainConfig train;
  BandSelection bands;
  // Optional progress callback: (band or kJointBand, report).
  std::function<void(int band, const TrainReport& report)> on_band_done;
};

struct SystemTrainResult {
  EnhancementSystem system;
  std::vector<int> trained_bands;  // kJointBand for the joint model
  std::vector<TrainReport> reports;
};

/// Trains band models on `train` with validation on `validation`. Feature
/// normalization is estimated on `train`. With a single band selected the
/// other entries of band_models are left empty. Band b uses seed
/// train.seed + b so that bands are independent of training order.
SystemTrainResult TrainSystem(const EnvelopeCorpus& train, const EnvelopeCorpus& validation,
                              const SystemTrainOptions& options);

/// One line of an evaluation table.
struct EvalRow {
  std::string noise_type;
  double snr_db = 0.0;
  double elc_unprocessed = 0.0;
  double elc_enhanced = 0.0;
  double stoi_unprocessed = 0.0;
  double stoi_enhanced = 0.0;
};

using Enhancer = std::function<TimeSignal(const TimeSignal& noisy)>;

/// Mixes each clean utterance with `noise` at every SNR, enhances and scores
/// it. Scores are means over utterances. Mixing seeds derive from `seed`, so
/// every SNR uses the same noise segments.
std::vector<EvalRow> EvaluateEnhancer(const Enhancer& enhance, std::span<const TimeSignal> clean,
                                      const TimeSignal& noise, const std::string& noise_type,
                                      std::span<const double> snrs_db, std::uint64_t seed,
                                      const StftConfig& stft = {}, const BandLayout& layout = BuildBandLayout(),
                                      int envelope_len = kEnvelopeLen);

std::vector<EvalRow> EvaluateSystem(const EnhancementSystem& system, std::span<const TimeSignal> clean,
                                    const TimeSignal& noise, const std::string& noise_type,
                                    std::span<const double> snrs_db, std::uint64_t seed);

enum class TableFormat { kText, kCsv };

/// ELC and STOI tables, rows sorted by (noise type, SNR). Values use two
/// decimals. An empty row set yields the headers alone.
std::string RenderTables(std::span<const EvalRow> rows, TableFormat format);

}  // namespace astoi

#endif  // ASTOI_PIPELINE_HPP_
