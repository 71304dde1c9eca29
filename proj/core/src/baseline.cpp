// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/baseline.hpp"

#include <cmath>
#include <string>

#include "astoi/config.hpp"
#include "astoi/errors.hpp"

namespace astoi {

namespace {

constexpr long kStsaFormatVersion = 1;

Matrix LogMagnitude(const Matrix& magnitude) {
  return magnitude.unaryExpr([](double v) { return std::log1p(v); });
}

}  // namespace

StsaCorpus StsaCorpusFromPairs(std::span<const TimeSignal> clean, std::span<const TimeSignal> noisy,
                               const StftConfig& stft) {
  if (clean.size() != noisy.size()) throw InvalidArgument("clean and noisy lists differ in length");
  StsaCorpus c;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (clean[i].size() != noisy[i].size()) throw InvalidArgument("clean and noisy utterance lengths differ");
    c.clean.push_back(Analyze(clean[i], stft).magnitude);
    c.noisy.push_back(Analyze(noisy[i], stft).magnitude);
  }
  return c;
}

void StsaFeatures(const Matrix& log_noisy, int step, int context_frames, double* out) {
  const auto bins = log_noisy.cols();
  for (int c = 0; c < context_frames; ++c) {
    const int frame = step - context_frames + 1 + c;
    double* dst = out + static_cast<Eigen::Index>(c) * bins;
    if (frame < 0) {
      std::fill(dst, dst + bins, 0.0);
    } else {
      for (Eigen::Index k = 0; k < bins; ++k) dst[k] = log_noisy(frame, k);
    }
  }
}

std::vector<int> StsaCoverage(int num_frames, int output_frames) {
  std::vector<int> count(static_cast<std::size_t>(std::max(num_frames, 0)), 0);
  for (int m = output_frames - 1; m < num_frames; ++m) {
    for (int i = 0; i < output_frames; ++i) ++count[static_cast<std::size_t>(m - output_frames + 1 + i)];
  }
  return count;
}

StsaTrainingData::StsaTrainingData(const StsaCorpus& corpus, FeatureNorm norm, int context_frames,
                                   int output_frames)
    : corpus_(&corpus), norm_(std::move(norm)), context_(context_frames), outputs_(output_frames) {
  if (corpus.clean.empty() || corpus.clean.size() != corpus.noisy.size()) {
    throw InvalidArgument("baseline corpus is empty or unpaired");
  }
  if (context_frames < output_frames || output_frames <= 0) {
    throw InvalidArgument("context must cover the output frames");
  }
  bins_ = static_cast<int>(corpus.noisy.front().cols());
  if (!norm_.empty() && norm_.mean.size() != input_dim()) {
    throw InvalidArgument("feature normalization does not match the baseline input");
  }
  for (std::size_t u = 0; u < corpus.noisy.size(); ++u) {
    log_noisy_.push_back(LogMagnitude(corpus.noisy[u]));
    for (int m = outputs_ - 1; m < corpus.noisy[u].rows(); ++m) steps_.emplace_back(u, m);
  }
}

void StsaTrainingData::Gather(std::span<const std::size_t> indices, Matrix& inputs, Matrix& clean,
                              Matrix& noisy) const {
  const auto b = static_cast<Eigen::Index>(indices.size());
  inputs.resize(input_dim(), b);
  clean.resize(target_dim(), b);
  noisy.resize(target_dim(), b);
  for (Eigen::Index c = 0; c < b; ++c) {
    const auto [utt, step] = steps_.at(indices[static_cast<std::size_t>(c)]);
    StsaFeatures(log_noisy_[utt], step, context_, inputs.col(c).data());
    NormalizeFeatures(norm_, inputs.col(c).data(), inputs.rows());
    for (int i = 0; i < outputs_; ++i) {
      const int frame = step - outputs_ + 1 + i;
      for (int k = 0; k < bins_; ++k) {
        clean(i * bins_ + k, c) = corpus_->clean[utt](frame, k);
        noisy(i * bins_ + k, c) = corpus_->noisy[utt](frame, k);
      }
    }
  }
}

FeatureNorm ComputeStsaNorm(const StsaCorpus& corpus, int context_frames, int output_frames) {
  const StsaTrainingData data(corpus, {}, context_frames, output_frames);
  const Eigen::Index dim = data.input_dim();
  Vector sum = Vector::Zero(dim);
  Vector sum_sq = Vector::Zero(dim);
  Matrix in, cl, no;
  constexpr std::size_t kChunk = 512;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    idx.clear();
    for (std::size_t i = start; i < std::min(data.size(), start + kChunk); ++i) idx.push_back(i);
    data.Gather(idx, in, cl, no);
    sum += in.rowwise().sum();
    sum_sq += in.cwiseProduct(in).rowwise().sum();
  }
  const auto n = static_cast<double>(data.size());
  FeatureNorm norm;
  norm.mean = sum / n;
  norm.stddev = (sum_sq / n - norm.mean.cwiseProduct(norm.mean)).cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (norm.stddev[i] < 1e-8) norm.stddev[i] = 1.0;
  }
  return norm;
}

StsaTrainResult TrainStsa(const StsaCorpus& train, const StsaCorpus& validation, const StsaTrainOptions& options) {
  StsaTrainResult result;
  StsaSystem& sys = result.system;
  sys.context_frames = options.context_frames;
  sys.output_frames = options.output_frames;
  sys.feature_norm = ComputeStsaNorm(train, options.context_frames, options.output_frames);
  const StsaTrainingData tr(train, sys.feature_norm, options.context_frames, options.output_frames);
  const StsaTrainingData va(validation, sys.feature_norm, options.context_frames, options.output_frames);

  ModelShape shape;
  shape.input_dim = tr.input_dim();
  shape.hidden = options.hidden;
  shape.output_dim = tr.target_dim();
  shape.block_len = tr.target_dim() / options.output_frames;
  shape.objective = Objective::kSpectralMse;
  TrainResult r = Train(InitModel(shape, options.train.seed), tr, va, options.train);
  sys.model = std::move(r.model);
  result.report = std::move(r.report);
  return result;
}

Matrix StsaGains(const StsaSystem& system, const Spectrogram& noisy) {
  const int bins = static_cast<int>(noisy.num_bins());
  const int frames = static_cast<int>(noisy.num_frames());
  const int ctx = system.context_frames;
  const int outs = system.output_frames;
  if (system.model.input_dim() != ctx * bins || system.model.output_dim() != outs * bins) {
    throw InvalidArgument("baseline model does not match the spectrogram size");
  }
  if (frames < outs) throw InvalidArgument("input is too short for the baseline");

  const Matrix log_noisy = LogMagnitude(noisy.magnitude);
  const int steps = frames - outs + 1;
  Matrix features(ctx * bins, steps);
  for (int s = 0; s < steps; ++s) {
    StsaFeatures(log_noisy, s + outs - 1, ctx, features.col(s).data());
    NormalizeFeatures(system.feature_norm, features.col(s).data(), features.rows());
  }
  const Matrix out = Forward(system.model, features, Mode::kInfer);

  Matrix sum = Matrix::Zero(frames, bins);
  for (int s = 0; s < steps; ++s) {
    for (int i = 0; i < outs; ++i) {
      for (int k = 0; k < bins; ++k) sum(s + i, k) += out(i * bins + k, s);
    }
  }
  const std::vector<int> count = StsaCoverage(frames, outs);
  for (int m = 0; m < frames; ++m) sum.row(m) /= static_cast<double>(count[static_cast<std::size_t>(m)]);
  return sum;
}

TimeSignal StsaEnhance(const StsaSystem& system, const TimeSignal& noisy) {
  const Spectrogram spec = Analyze(noisy, system.stft_config);
  return Synthesize(ApplyGain(spec, StsaGains(system, spec)));
}

void SaveStsa(const StsaSystem& system, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  KeyValues kv;
  kv["format_version"] = std::to_string(kStsaFormatVersion);
  kv["fft_size"] = std::to_string(system.stft_config.fft_size);
  kv["window_len"] = std::to_string(system.stft_config.window_len);
  kv["hop"] = std::to_string(system.stft_config.hop);
  kv["context_frames"] = std::to_string(system.context_frames);
  kv["output_frames"] = std::to_string(system.output_frames);
  WriteKeyValueFile(kv, dir / "stsa.cfg");
  SaveFeatureNorm(system.feature_norm, dir / "feature_norm.bin");
  SaveModel(system.model, dir / "stsa.astoi");
}

StsaSystem LoadStsa(const std::filesystem::path& dir) {
  const KeyValues kv = ReadKeyValueFile(dir / "stsa.cfg");
  if (GetInt(kv, "format_version") != kStsaFormatVersion) {
    throw FormatError(FormatError::Kind::kBadVersion, "unsupported stsa.cfg version in '" + dir.string() + "'");
  }
  StsaSystem s;
  s.stft_config.fft_size = static_cast<int>(GetInt(kv, "fft_size"));
  s.stft_config.window_len = static_cast<int>(GetInt(kv, "window_len"));
  s.stft_config.hop = static_cast<int>(GetInt(kv, "hop"));
  s.context_frames = static_cast<int>(GetInt(kv, "context_frames"));
  s.output_frames = static_cast<int>(GetInt(kv, "output_frames"));
  s.feature_norm = LoadFeatureNorm(dir / "feature_norm.bin");
  s.model = LoadModel(dir / "stsa.astoi", s.output_frames * s.stft_config.num_bins());
  return s;
}

}  // namespace astoi
