// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <string>

#include "astoi/config.hpp"
#include "astoi/cost.hpp"
#include "astoi/errors.hpp"

namespace astoi {

namespace {

constexpr long kSystemFormatVersion = 1;

std::string BandFileName(int band) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "band_%02d.astoi", band);
  return buf;
}

void CheckSameFrontEnd(const EnhancementSystem& a, const EnhancementSystem& b) {
  if (!(a.layout == b.layout) || !(a.stft_config == b.stft_config) || a.envelope_len != b.envelope_len) {
    throw InvalidArgument("systems differ in band layout, STFT or envelope length");
  }
}

// Raw (un-normalized) features of every envelope window, one per column.
Matrix WindowFeatures(const EnhancementSystem& system, const EnvelopeMatrix& noisy_env) {
  const int n = system.envelope_len;
  const Eigen::Index windows = noisy_env.cols() - n + 1;
  if (noisy_env.rows() != system.layout.num_bands()) {
    throw InvalidArgument("envelope rows do not match the band layout");
  }
  if (windows <= 0) {
    throw InvalidArgument("input has " + std::to_string(noisy_env.cols()) + " frames; at least " +
                          std::to_string(n) + " are needed");
  }
  Matrix features(noisy_env.rows() * n, windows);
  for (Eigen::Index w = 0; w < windows; ++w) {
    double* col = features.col(w).data();
    EnvelopeFeatures(noisy_env, static_cast<int>(w + n - 1), n, col);
    NormalizeFeatures(system.feature_norm, col, features.rows());
  }
  return features;
}

std::vector<double> Row(const EnvelopeMatrix& env, Eigen::Index j, Eigen::Index first, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = env(j, first + i);
  return v;
}

}  // namespace

void EnhancementSystem::Validate() const {
  stft_config.Validate();
  const int bands = layout.num_bands();
  const int dim = bands * envelope_len;
  if (bands == 0) throw InvalidArgument("system has an empty band layout");
  if (band_models.size() != 1 && band_models.size() != static_cast<std::size_t>(bands)) {
    throw InvalidArgument("system needs one model per band or a single joint model");
  }
  const int expected_out = joint() ? dim : envelope_len;
  for (const MlpModel& m : band_models) {
    if (m.layers.empty()) continue;  // not trained yet
    if (m.input_dim() != dim) throw InvalidArgument("model input does not match bands x envelope length");
    if (m.output_dim() != expected_out || m.block_len != envelope_len) {
      throw InvalidArgument("model output does not match the envelope length");
    }
  }
  if (!feature_norm.empty() && (feature_norm.mean.size() != dim || feature_norm.stddev.size() != dim)) {
    throw InvalidArgument("feature normalization does not match the model input");
  }
}

void SaveSystem(const EnhancementSystem& system, const std::filesystem::path& dir) {
  system.Validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  KeyValues kv;
  kv["format_version"] = std::to_string(kSystemFormatVersion);
  kv["objective"] = ObjectiveName(system.objective);
  kv["mode"] = system.joint() ? "joint" : "per-band";
  kv["fft_size"] = std::to_string(system.stft_config.fft_size);
  kv["window_len"] = std::to_string(system.stft_config.window_len);
  kv["hop"] = std::to_string(system.stft_config.hop);
  kv["sample_rate_hz"] = std::to_string(system.layout.sample_rate_hz);
  kv["num_bands"] = std::to_string(system.layout.num_bands());
  kv["first_center_hz"] = std::to_string(system.layout.bands.front().center_hz);
  kv["envelope_len"] = std::to_string(system.envelope_len);
  kv["out_of_band"] = system.policy == OutOfBandPolicy::kZero ? "zero" : "pass-through";
  WriteKeyValueFile(kv, dir / "system.cfg");
  SaveFeatureNorm(system.feature_norm, dir / "feature_norm.bin");

  if (system.joint()) {
    SaveModel(system.band_models.front(), dir / "joint.astoi");
    return;
  }
  for (std::size_t j = 0; j < system.band_models.size(); ++j) {
    if (system.band_models[j].layers.empty()) continue;
    SaveModel(system.band_models[j], dir / BandFileName(static_cast<int>(j)));
  }
}

EnhancementSystem LoadSystem(const std::filesystem::path& dir) {
  const KeyValues kv = ReadKeyValueFile(dir / "system.cfg");
  if (GetInt(kv, "format_version") != kSystemFormatVersion) {
    throw FormatError(FormatError::Kind::kBadVersion, "unsupported system.cfg version in '" + dir.string() + "'");
  }
  EnhancementSystem s;
  s.objective = ParseObjective(GetString(kv, "objective"));
  s.stft_config.fft_size = static_cast<int>(GetInt(kv, "fft_size"));
  s.stft_config.window_len = static_cast<int>(GetInt(kv, "window_len"));
  s.stft_config.hop = static_cast<int>(GetInt(kv, "hop"));
  s.envelope_len = static_cast<int>(GetInt(kv, "envelope_len"));
  s.layout = BuildBandLayout(s.stft_config.fft_size, static_cast<int>(GetInt(kv, "sample_rate_hz")),
                             static_cast<int>(GetInt(kv, "num_bands")), GetDouble(kv, "first_center_hz"));
  const std::string oob = GetString(kv, "out_of_band");
  if (oob == "zero") {
    s.policy = OutOfBandPolicy::kZero;
  } else if (oob == "pass-through") {
    s.policy = OutOfBandPolicy::kPassThrough;
  } else {
    throw FormatError(FormatError::Kind::kMalformed, "unknown out_of_band policy '" + oob + "'");
  }
  s.feature_norm = LoadFeatureNorm(dir / "feature_norm.bin");

  const std::string mode = GetString(kv, "mode");
  const int n = s.envelope_len;
  if (mode == "joint") {
    s.band_models.push_back(LoadModel(dir / "joint.astoi", s.layout.num_bands() * n));
  } else if (mode == "per-band") {
    for (int j = 0; j < s.layout.num_bands(); ++j) {
      const auto path = dir / BandFileName(j);
      if (!std::filesystem::exists(path)) {
        throw IoError("model directory '" + dir.string() + "' lacks " + BandFileName(j));
      }
      s.band_models.push_back(LoadModel(path, n));
    }
  } else {
    throw FormatError(FormatError::Kind::kMalformed, "unknown system mode '" + mode + "'");
  }
  s.Validate();
  return s;
}

std::vector<std::vector<GainVector>> EstimateGainVectors(const EnhancementSystem& system,
                                                         const EnvelopeMatrix& noisy_env) {
  system.Validate();
  const Matrix features = WindowFeatures(system, noisy_env);
  const int n = system.envelope_len;
  const int bands = system.layout.num_bands();
  const Eigen::Index windows = features.cols();

  std::vector<std::vector<GainVector>> out(static_cast<std::size_t>(bands));
  auto emit = [&](const Matrix& gains, int band, Eigen::Index row0) {
    auto& dst = out[static_cast<std::size_t>(band)];
    dst.resize(static_cast<std::size_t>(windows));
    for (Eigen::Index w = 0; w < windows; ++w) {
      GainVector& g = dst[static_cast<std::size_t>(w)];
      g.band = band;
      g.frame = static_cast<int>(w + n - 1);
      g.values.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) g.values[static_cast<std::size_t>(i)] = gains(row0 + i, w);
    }
  };

  if (system.joint()) {
    const Matrix gains = Forward(system.band_models.front(), features, Mode::kInfer);
    for (int j = 0; j < bands; ++j) emit(gains, j, static_cast<Eigen::Index>(j) * n);
    return out;
  }
  for (int j = 0; j < bands; ++j) {
    const MlpModel& model = system.band_models[static_cast<std::size_t>(j)];
    if (model.layers.empty()) throw InvalidArgument("band " + std::to_string(j) + " has no trained model");
    emit(Forward(model, features, Mode::kInfer), j, 0);
  }
  return out;
}

Matrix EstimateBandGains(const EnhancementSystem& system, const EnvelopeMatrix& noisy_env) {
  const auto vectors = EstimateGainVectors(system, noisy_env);
  const auto frames = static_cast<int>(noisy_env.cols());
  Matrix gains(noisy_env.rows(), frames);
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    const std::vector<double> g = AverageOverlappingGains(vectors[j], frames);
    for (int m = 0; m < frames; ++m) gains(static_cast<Eigen::Index>(j), m) = g[static_cast<std::size_t>(m)];
  }
  return gains;
}

Matrix OracleBandGains(const EnvelopeMatrix& clean_env, const EnvelopeMatrix& noisy_env) {
  if (clean_env.rows() != noisy_env.rows() || clean_env.cols() != noisy_env.cols()) {
    throw InvalidArgument("clean and noisy envelopes differ in shape");
  }
  Matrix g(noisy_env.rows(), noisy_env.cols());
  for (Eigen::Index m = 0; m < g.cols(); ++m) {
    for (Eigen::Index j = 0; j < g.rows(); ++j) {
      const double y = noisy_env(j, m);
      g(j, m) = y > 0.0 ? std::min(1.0, clean_env(j, m) / y) : 0.0;
    }
  }
  return g;
}

TimeSignal EnhanceWithBandGains(const Spectrogram& noisy, const Matrix& band_gains, const BandLayout& layout,
                                OutOfBandPolicy policy) {
  if (band_gains.cols() != noisy.num_frames()) throw InvalidArgument("band gains do not cover every frame");
  const Matrix gains = BandGainsToStftGains(band_gains, layout, static_cast<int>(noisy.num_bins()), policy);
  return Synthesize(ApplyGain(noisy, gains));
}

TimeSignal Enhance(const EnhancementSystem& system, const TimeSignal& noisy) {
  if (noisy.sample_rate_hz != system.layout.sample_rate_hz) {
    throw InvalidArgument("input is at " + std::to_string(noisy.sample_rate_hz) + " Hz, the system expects " +
                          std::to_string(system.layout.sample_rate_hz) + " Hz");
  }
  const Spectrogram spec = Analyze(noisy, system.stft_config);
  const EnvelopeMatrix env = Envelopes(spec, system.layout);
  return EnhanceWithBandGains(spec, EstimateBandGains(system, env), system.layout, system.policy);
}

ScoreResult ScoreElc(const TimeSignal& clean, const TimeSignal& processed, const StftConfig& stft,
                     const BandLayout& layout, int envelope_len) {
  if (clean.size() != processed.size()) {
    throw InvalidArgument("clean and processed lengths differ (" + std::to_string(clean.size()) + " vs " +
                          std::to_string(processed.size()) + ")");
  }
  const EnvelopeMatrix x = Envelopes(Analyze(clean, stft), layout);
  const EnvelopeMatrix xh = Envelopes(Analyze(processed, stft), layout);
  ScoreResult r;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    for (Eigen::Index first = 0; first + envelope_len <= x.cols(); ++first) {
      try {
        sum += Elc(Row(x, j, first, envelope_len), Row(xh, j, first, envelope_len));
        ++r.scored;
      } catch (const DegenerateInput&) {
        ++r.degenerate;
      }
    }
  }
  if (r.scored == 0) throw DegenerateInput("no envelope window could be scored");
  r.mean = sum / static_cast<double>(r.scored);
  return r;
}

ScoreResult ScoreApproxStoi(const TimeSignal& clean, const TimeSignal& processed, const StftConfig& stft,
                            const BandLayout& layout, int envelope_len) {
  return ScoreElc(clean, processed, stft, layout, envelope_len);
}

double GainCorrelation(const EnhancementSystem& a, const EnhancementSystem& b,
                       std::span<const TimeSignal> noisy_inputs) {
  CheckSameFrontEnd(a, b);
  std::vector<double> ga;
  std::vector<double> gb;
  for (const TimeSignal& y : noisy_inputs) {
    const EnvelopeMatrix env = Envelopes(Analyze(y, a.stft_config), a.layout);
    for (const auto& band : EstimateGainVectors(a, env)) {
      for (const GainVector& g : band) ga.insert(ga.end(), g.values.begin(), g.values.end());
    }
    for (const auto& band : EstimateGainVectors(b, env)) {
      for (const GainVector& g : band) gb.insert(gb.end(), g.values.begin(), g.values.end());
    }
  }
  return Pearson(ga, gb);
}

BandSelection BandSelection::Parse(const std::string& text) {
  if (text == "all") return {Kind::kAll, 0};
  if (text == "joint") return {Kind::kJoint, 0};
  int band = -1;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), band);
  if (ec != std::errc() || ptr != text.data() + text.size() || band < 0 || band >= kNumBands) {
    throw InvalidArgument("band must be 0.." + std::to_string(kNumBands - 1) + ", 'all' or 'joint'");
  }
  return {Kind::kOne, band};
}

SystemTrainResult TrainSystem(const EnvelopeCorpus& train, const EnvelopeCorpus& validation,
                              const SystemTrainOptions& options) {
  if (train.num_windows() == 0 || validation.num_windows() == 0) {
    throw InvalidArgument("training and validation corpora must be non-empty");
  }
  if (train.num_bands() != validation.num_bands() || train.envelope_len() != validation.envelope_len()) {
    throw InvalidArgument("training and validation corpora differ in shape");
  }
  const int bands = train.num_bands();
  const int n = train.envelope_len();

  SystemTrainResult result;
  EnhancementSystem& sys = result.system;
  sys.layout = BuildBandLayout(sys.stft_config.fft_size, kWorkingRateHz, bands);
  sys.envelope_len = n;
  sys.objective = options.objective;
  sys.feature_norm = ComputeFeatureNorm(train);

  ModelShape shape;
  shape.input_dim = bands * n;
  shape.hidden = options.hidden;
  shape.block_len = n;
  shape.objective = options.objective;

  auto train_one = [&](int band) {
    shape.output_dim = band == kJointBand ? bands * n : n;
    TrainConfig cfg = options.train;
    cfg.seed = options.train.seed + static_cast<std::uint64_t>(band == kJointBand ? 0 : band);
    const EnvelopeTrainingData tr(train, sys.feature_norm, band);
    const EnvelopeTrainingData va(validation, sys.feature_norm, band);
    TrainResult r = Train(InitModel(shape, cfg.seed), tr, va, cfg);
    if (options.on_band_done) options.on_band_done(band, r.report);
    result.trained_bands.push_back(band);
    result.reports.push_back(std::move(r.report));
    return std::move(r.model);
  };

  switch (options.bands.kind) {
    case BandSelection::Kind::kJoint:
      sys.band_models.push_back(train_one(kJointBand));
      break;
    case BandSelection::Kind::kOne:
      if (options.bands.band >= bands) throw InvalidArgument("band index out of range");
      sys.band_models.resize(static_cast<std::size_t>(bands));
      sys.band_models[static_cast<std::size_t>(options.bands.band)] = train_one(options.bands.band);
      break;
    case BandSelection::Kind::kAll:
      sys.band_models.resize(static_cast<std::size_t>(bands));
      for (int j = 0; j < bands; ++j) sys.band_models[static_cast<std::size_t>(j)] = train_one(j);
      break;
  }
  return result;
}

std::vector<EvalRow> EvaluateEnhancer(const Enhancer& enhance, std::span<const TimeSignal> clean,
                                      const TimeSignal& noise, const std::string& noise_type,
                                      std::span<const double> snrs_db, std::uint64_t seed, const StftConfig& stft,
                                      const BandLayout& layout, int envelope_len) {
  if (clean.empty()) throw InvalidArgument("evaluation set is empty");
  std::vector<EvalRow> rows;
  for (const double snr : snrs_db) {
    SplitSpec spec;
    spec.split = Split::kTest;
    spec.test_snrs_db = {snr};
    spec.noise_source = noise_type;
    spec.seed = seed;
    const std::vector<MixedUtterance> mixes = MixUtterances(clean, noise, spec);

    EvalRow row;
    row.noise_type = noise_type;
    row.snr_db = snr;
    for (const MixedUtterance& u : mixes) {
      const TimeSignal enhanced = enhance(u.noisy);
      row.elc_unprocessed += ScoreElc(u.clean, u.noisy, stft, layout, envelope_len).mean;
      row.elc_enhanced += ScoreElc(u.clean, enhanced, stft, layout, envelope_len).mean;
      row.stoi_unprocessed += ScoreApproxStoi(u.clean, u.noisy, stft, layout, envelope_len).mean;
      row.stoi_enhanced += ScoreApproxStoi(u.clean, enhanced, stft, layout, envelope_len).mean;
    }
    const auto count = static_cast<double>(mixes.size());
    row.elc_unprocessed /= count;
    row.elc_enhanced /= count;
    row.stoi_unprocessed /= count;
    row.stoi_enhanced /= count;
    rows.push_back(row);
  }
  return rows;
}

std::vector<EvalRow> EvaluateSystem(const EnhancementSystem& system, std::span<const TimeSignal> clean,
                                    const TimeSignal& noise, const std::string& noise_type,
                                    std::span<const double> snrs_db, std::uint64_t seed) {
  const Enhancer enhance = [&system](const TimeSignal& noisy) { return Enhance(system, noisy); };
  return EvaluateEnhancer(enhance, clean, noise, noise_type, snrs_db, seed, system.stft_config, system.layout,
                          system.envelope_len);
}

}  // namespace astoi
