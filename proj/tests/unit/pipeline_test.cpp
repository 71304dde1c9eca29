// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "astoi/errors.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace astoi {
namespace {

using testing::TempDir;

TimeSignal WhiteNoise(std::uint64_t seed, std::size_t n, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  return {oracle::RandomVector(rng, n, -amp, amp), kWorkingRateHz};
}

TimeSignal Add(const TimeSignal& a, const TimeSignal& b) {
  TimeSignal out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out.samples[i] += b.samples[i];
  return out;
}

EnhancementSystem RandomSystem(std::uint64_t seed, bool joint = false) {
  EnhancementSystem s;
  ModelShape shape;
  shape.hidden = {8};
  if (joint) {
    shape.output_dim = 450;
    s.band_models.push_back(InitModel(shape, seed));
  } else {
    for (int j = 0; j < 15; ++j) s.band_models.push_back(InitModel(shape, seed + static_cast<std::uint64_t>(j)));
  }
  std::mt19937_64 rng(seed);
  s.feature_norm.mean = Vector::Constant(450, 0.05);
  s.feature_norm.stddev = Vector::Constant(450, 0.1);
  return s;
}

// Independent ELC score: direct-DFT Hann spectra, band sums, two-pass
// correlation of every full window.
double OracleScore(const TimeSignal& clean, const TimeSignal& processed) {
  const auto w = oracle::PeriodicHann(256);
  auto envelopes = [&](const std::vector<double>& x) {
    const std::size_t frames = (x.size() - 256 + 127) / 128 + 1;
    std::vector<std::vector<double>> env(15, std::vector<double>(frames, 0.0));
    for (std::size_t m = 0; m < frames; ++m) {
      std::vector<double> f(256, 0.0);
      for (std::size_t n = 0; n < 256 && m * 128 + n < x.size(); ++n) f[n] = x[m * 128 + n] * w[n];
      const auto spec = oracle::DirectDft(f);
      for (int j = 0; j < 15; ++j) {
        const double c = 150.0 * std::pow(2.0, j / 3.0);
        const double lo = c * std::pow(2.0, -1.0 / 6.0), hi = c * std::pow(2.0, 1.0 / 6.0);
        double s = 0.0;
        for (std::size_t k = 0; k < spec.size(); ++k) {
          const double fk = k * 10000.0 / 256.0;
          if (fk >= lo && fk < hi) s += std::norm(spec[k]);
        }
        env[static_cast<std::size_t>(j)][m] = std::sqrt(s);
      }
    }
    return env;
  };
  const auto x = envelopes(clean.samples), y = envelopes(processed.samples);
  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < 15; ++j) {
    const auto& xj = x[static_cast<std::size_t>(j)];
    const auto& yj = y[static_cast<std::size_t>(j)];
    for (std::size_t first = 0; first + 30 <= xj.size(); ++first) {
      const std::vector<double> a(xj.begin() + static_cast<std::ptrdiff_t>(first),
                                  xj.begin() + static_cast<std::ptrdiff_t>(first + 30));
      const std::vector<double> b(yj.begin() + static_cast<std::ptrdiff_t>(first),
                                  yj.begin() + static_cast<std::ptrdiff_t>(first + 30));
      sum += oracle::Correlation(a, b);
      ++count;
    }
  }
  return sum / count;
}

TEST(ScoreElc, MatchesIndependentComputation) {
  const TimeSignal clean = SynthPseudoSpeech(0.6, 3);
  const TimeSignal noisy = Add(clean, WhiteNoise(4, clean.size(), 0.05));
  const ScoreResult r = ScoreElc(clean, noisy);
  EXPECT_EQ(r.degenerate, 0);
  EXPECT_NEAR(r.mean, OracleScore(clean, noisy), 1e-9);
  EXPECT_EQ(ScoreApproxStoi(clean, noisy).mean, r.mean);
}

TEST(ScoreElc, PerfectForCleanAndScaledInput) {
  const TimeSignal clean = SynthPseudoSpeech(2.0, 5);
  EXPECT_NEAR(ScoreElc(clean, clean).mean, 1.0, 1e-12);
  TimeSignal louder = clean;
  for (double& v : louder.samples) v *= 3.0;
  EXPECT_NEAR(ScoreElc(clean, louder).mean, 1.0, 1e-12);
  const TimeSignal noisy = Add(clean, WhiteNoise(6, clean.size(), 0.1));
  EXPECT_LT(ScoreElc(clean, noisy).mean, 0.9);
}

TEST(ScoreElc, Errors) {
  const TimeSignal clean = SynthPseudoSpeech(1.0, 5);
  TimeSignal shorter = clean;
  shorter.samples.pop_back();
  EXPECT_THROW(ScoreElc(clean, shorter), InvalidArgument);
  const TimeSignal silent{std::vector<double>(clean.size(), 0.0), kWorkingRateHz};
  EXPECT_THROW(ScoreElc(clean, silent), DegenerateInput);
}

TEST(OracleBandGains, ClippedRatio) {
  Matrix x(2, 3), y(2, 3);
  x << 1, 4, 0, 2, 1, 5;
  y << 2, 2, 0, 4, 0, 10;
  const Matrix g = OracleBandGains(x, y);
  EXPECT_EQ(g(0, 0), 0.5);
  EXPECT_EQ(g(0, 1), 1.0);
  EXPECT_EQ(g(0, 2), 0.0);
  EXPECT_EQ(g(1, 0), 0.5);
  EXPECT_EQ(g(1, 1), 0.0);
  EXPECT_EQ(g(1, 2), 0.5);
  EXPECT_THROW(OracleBandGains(x, Matrix::Zero(2, 2)), InvalidArgument);
}

TEST(EnhanceWithBandGains, UnitGainsPassThroughReconstructs) {
  const TimeSignal y = WhiteNoise(7, 5000, 0.3);
  const Spectrogram spec = Analyze(y);
  const BandLayout layout = BuildBandLayout();
  const Matrix ones = Matrix::Ones(15, spec.num_frames());
  const TimeSignal out = EnhanceWithBandGains(spec, ones, layout, OutOfBandPolicy::kPassThrough);
  ASSERT_EQ(out.size(), y.size());
  for (std::size_t n = 256; n + 256 < y.size(); ++n) EXPECT_NEAR(out.samples[n], y.samples[n], 1e-10);
}

TEST(EnhanceWithBandGains, ZeroPolicyRemovesOutOfBandContent) {
  // 50 Hz and 4.8 kHz lie outside every band; 1 kHz lies inside.
  TimeSignal y{std::vector<double>(8000), kWorkingRateHz};
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double t = static_cast<double>(n) / kWorkingRateHz;
    y.samples[n] = std::sin(2 * M_PI * 50 * t) + std::sin(2 * M_PI * 1000 * t) + std::sin(2 * M_PI * 4800 * t);
  }
  const Spectrogram spec = Analyze(y);
  const TimeSignal out = EnhanceWithBandGains(spec, Matrix::Ones(15, spec.num_frames()), BuildBandLayout());
  EXPECT_NEAR(oracle::SineFitAmplitude(out.samples, 1000, kWorkingRateHz, 1000, 7000), 1.0, 0.01);
  EXPECT_LT(oracle::SineFitAmplitude(out.samples, 4800, kWorkingRateHz, 1000, 7000), 0.01);
  EXPECT_LT(oracle::SineFitAmplitude(out.samples, 50, kWorkingRateHz, 1000, 7000), 0.2);
  EXPECT_THROW(EnhanceWithBandGains(spec, Matrix::Ones(15, 3), BuildBandLayout()), InvalidArgument);
}

TEST(EnhanceWithBandGains, OracleGainsImproveScore) {
  const TimeSignal clean = SynthPseudoSpeech(3.0, 8);
  const TimeSignal noise = WhiteNoise(9, clean.size() * 2);
  const Mixture mix = MixAtSnr(clean, noise, 0.0, 1);
  const BandLayout layout = BuildBandLayout();
  const Spectrogram noisy = Analyze(mix.mixture);
  const Matrix g = OracleBandGains(Envelopes(Analyze(clean), layout), Envelopes(noisy, layout));
  const TimeSignal enhanced = EnhanceWithBandGains(noisy, g, layout);
  EXPECT_GT(ScoreElc(clean, enhanced).mean, ScoreElc(clean, mix.mixture).mean);
}

TEST(EnhancementSystem, ValidateChecksShapes) {
  EnhancementSystem s = RandomSystem(1);
  EXPECT_NO_THROW(s.Validate());
  EXPECT_FALSE(s.joint());
  EXPECT_TRUE(RandomSystem(1, true).joint());
  s.band_models.pop_back();
  EXPECT_THROW(s.Validate(), InvalidArgument);
  EnhancementSystem t = RandomSystem(1);
  t.feature_norm.mean = Vector::Zero(3);
  EXPECT_THROW(t.Validate(), InvalidArgument);
  EnhancementSystem partial = RandomSystem(1);
  partial.band_models[4] = MlpModel{};
  EXPECT_NO_THROW(partial.Validate());
}

TEST(EstimateGainVectors, WindowsAndRange) {
  const EnhancementSystem s = RandomSystem(2);
  const TimeSignal y = WhiteNoise(3, 6000, 0.2);
  const EnvelopeMatrix env = Envelopes(Analyze(y), s.layout);
  const auto vectors = EstimateGainVectors(s, env);
  ASSERT_EQ(vectors.size(), 15u);
  const auto windows = static_cast<std::size_t>(env.cols() - 29);
  for (int j = 0; j < 15; ++j) {
    ASSERT_EQ(vectors[static_cast<std::size_t>(j)].size(), windows);
    for (std::size_t w = 0; w < windows; ++w) {
      const GainVector& g = vectors[static_cast<std::size_t>(j)][w];
      EXPECT_EQ(g.band, j);
      EXPECT_EQ(g.frame, static_cast<int>(w) + 29);
      for (double v : g.values) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
      }
    }
  }
  // Band gains are the averages of the vectors.
  const Matrix bg = EstimateBandGains(s, env);
  for (int j = 0; j < 15; ++j) {
    const auto avg = AverageOverlappingGains(vectors[static_cast<std::size_t>(j)], static_cast<int>(env.cols()));
    for (Eigen::Index m = 0; m < env.cols(); ++m) EXPECT_EQ(bg(j, m), avg[static_cast<std::size_t>(m)]);
  }
  EXPECT_THROW(EstimateGainVectors(s, env.leftCols(20)), InvalidArgument);
}

TEST(EstimateGainVectors, JointModelSplitsOutputByBand) {
  const EnhancementSystem s = RandomSystem(4, true);
  const TimeSignal y = WhiteNoise(5, 5000, 0.2);
  const EnvelopeMatrix env = Envelopes(Analyze(y), s.layout);
  const auto vectors = EstimateGainVectors(s, env);
  Matrix features(450, 1);
  EnvelopeFeatures(env, 29, 30, features.data());
  NormalizeFeatures(s.feature_norm, features.data(), 450);
  const Matrix out = Forward(s.band_models[0], features, Mode::kInfer);
  for (int j = 0; j < 15; ++j) {
    for (int i = 0; i < 30; ++i) EXPECT_NEAR(vectors[static_cast<std::size_t>(j)][0].values[static_cast<std::size_t>(i)], out(j * 30 + i, 0), 1e-12);
  }
}

TEST(Enhance, LengthDeterminismAndErrors) {
  const EnhancementSystem s = RandomSystem(6);
  const TimeSignal y = WhiteNoise(7, 7777, 0.2);
  const TimeSignal a = Enhance(s, y);
  EXPECT_EQ(a.size(), y.size());
  EXPECT_EQ(a, Enhance(s, y));
  TimeSignal wrong = y;
  wrong.sample_rate_hz = 16000;
  EXPECT_THROW(Enhance(s, wrong), InvalidArgument);
  EXPECT_THROW(Enhance(s, WhiteNoise(1, 2000)), InvalidArgument);  // fewer than 30 frames
  EnhancementSystem partial = RandomSystem(6);
  partial.band_models[3] = MlpModel{};
  EXPECT_THROW(Enhance(partial, y), InvalidArgument);
}

TEST(SystemFiles, RoundTrip) {
  TempDir dir("pipeline");
  for (bool joint : {false, true}) {
    EnhancementSystem s = RandomSystem(8, joint);
    s.objective = Objective::kEmse;
    s.policy = OutOfBandPolicy::kPassThrough;
    const auto path = dir / (joint ? "joint" : "bands");
    SaveSystem(s, path);
    const EnhancementSystem back = LoadSystem(path);
    ASSERT_EQ(back.band_models.size(), s.band_models.size());
    for (std::size_t j = 0; j < s.band_models.size(); ++j) EXPECT_TRUE(back.band_models[j] == s.band_models[j]);
    EXPECT_EQ(back.objective, Objective::kEmse);
    EXPECT_EQ(back.policy, OutOfBandPolicy::kPassThrough);
    EXPECT_EQ(back.feature_norm, s.feature_norm);
    EXPECT_TRUE(back.layout == s.layout);
    EXPECT_EQ(back.stft_config, s.stft_config);
    const TimeSignal y = WhiteNoise(9, 5000, 0.2);
    EXPECT_EQ(Enhance(back, y), Enhance(s, y));
  }
}

TEST(SystemFiles, PartialSystemNeedsAllBandsToLoad) {
  TempDir dir("pipeline");
  EnhancementSystem s = RandomSystem(9);
  s.band_models[2] = MlpModel{};
  SaveSystem(s, dir.path());
  EXPECT_FALSE(std::filesystem::exists(dir / "band_02.astoi"));
  EXPECT_TRUE(std::filesystem::exists(dir / "band_03.astoi"));
  EXPECT_THROW(LoadSystem(dir.path()), IoError);
  // Filling in the missing band afterwards completes the directory.
  EnhancementSystem only = RandomSystem(9);
  for (int j = 0; j < 15; ++j) {
    if (j != 2) only.band_models[static_cast<std::size_t>(j)] = MlpModel{};
  }
  SaveSystem(only, dir.path());
  EXPECT_NO_THROW(LoadSystem(dir.path()));
  EXPECT_THROW(LoadSystem(dir / "missing"), IoError);
}

TEST(GainCorrelation, SelfIsOneAndFrontEndChecked) {
  const EnhancementSystem a = RandomSystem(10), b = RandomSystem(30);
  const std::vector<TimeSignal> inputs{WhiteNoise(1, 6000, 0.2), SynthPseudoSpeech(1.0, 2)};
  EXPECT_NEAR(GainCorrelation(a, a, inputs), 1.0, 1e-12);
  const double ab = GainCorrelation(a, b, inputs);
  EXPECT_LT(ab, 1.0);
  EXPECT_NEAR(ab, GainCorrelation(b, a, inputs), 1e-12);
  EnhancementSystem c = RandomSystem(10);
  c.envelope_len = 20;
  EXPECT_THROW(GainCorrelation(a, c, inputs), InvalidArgument);
}

TEST(BandSelection, Parse) {
  EXPECT_EQ(BandSelection::Parse("all").kind, BandSelection::Kind::kAll);
  EXPECT_EQ(BandSelection::Parse("joint").kind, BandSelection::Kind::kJoint);
  const BandSelection b = BandSelection::Parse("14");
  EXPECT_EQ(b.kind, BandSelection::Kind::kOne);
  EXPECT_EQ(b.band, 14);
  EXPECT_THROW(BandSelection::Parse("15"), InvalidArgument);
  EXPECT_THROW(BandSelection::Parse("-1"), InvalidArgument);
  EXPECT_THROW(BandSelection::Parse("3x"), InvalidArgument);
}

class TrainSystemTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    std::vector<TimeSignal> speech;
    for (std::uint64_t s = 0; s < 4; ++s) speech.push_back(SynthPseudoSpeech(2.0, 40 + s));
    const TimeSignal noise = WhiteNoise(11, 60000, 0.5);
    SplitSpec spec;
    train_ = new EnvelopeCorpus(BuildDataset({speech.data(), 3}, noise, spec, BuildBandLayout()));
    spec.split = Split::kValidation;
    val_ = new EnvelopeCorpus(BuildDataset({speech.data() + 3, 1}, noise, spec, BuildBandLayout()));
  }
  static void TearDownTestSuite() {
    delete train_;
    delete val_;
  }
  static SystemTrainOptions Options() {
    SystemTrainOptions o;
    o.hidden = {6};
    o.train.max_epochs = 2;
    o.train.minibatch = 32;
    return o;
  }
  static inline EnvelopeCorpus* train_ = nullptr;
  static inline EnvelopeCorpus* val_ = nullptr;
};

TEST_F(TrainSystemTest, SingleBandLeavesOthersEmpty) {
  SystemTrainOptions o = Options();
  o.bands = BandSelection::Parse("3");
  std::vector<int> seen;
  o.on_band_done = [&](int band, const TrainReport& r) {
    seen.push_back(band);
    EXPECT_EQ(r.epochs.size(), 2u);
  };
  const SystemTrainResult r = TrainSystem(*train_, *val_, o);
  EXPECT_EQ(seen, std::vector<int>{3});
  EXPECT_EQ(r.trained_bands, std::vector<int>{3});
  ASSERT_EQ(r.system.band_models.size(), 15u);
  for (int j = 0; j < 15; ++j) EXPECT_EQ(r.system.band_models[static_cast<std::size_t>(j)].layers.empty(), j != 3);
  EXPECT_EQ(r.system.feature_norm, ComputeFeatureNorm(*train_));
}

TEST_F(TrainSystemTest, BandResultIndependentOfSelection) {
  SystemTrainOptions o = Options();
  o.train.max_epochs = 1;
  const SystemTrainResult all = TrainSystem(*train_, *val_, o);
  o.bands = BandSelection::Parse("7");
  const SystemTrainResult one = TrainSystem(*train_, *val_, o);
  EXPECT_TRUE(all.system.band_models[7] == one.system.band_models[7]);
  EXPECT_EQ(all.trained_bands.size(), 15u);
}

TEST_F(TrainSystemTest, JointModel) {
  SystemTrainOptions o = Options();
  o.bands = BandSelection::Parse("joint");
  o.objective = Objective::kEmse;
  const SystemTrainResult r = TrainSystem(*train_, *val_, o);
  ASSERT_EQ(r.system.band_models.size(), 1u);
  EXPECT_TRUE(r.system.joint());
  EXPECT_EQ(r.system.band_models[0].output_dim(), 450);
  EXPECT_EQ(r.system.objective, Objective::kEmse);
  EXPECT_NO_THROW(r.system.Validate());
}

TEST(EvaluateEnhancer, IdentityEnhancerAndRowOrder) {
  std::vector<TimeSignal> clean{SynthPseudoSpeech(1.5, 1), SynthPseudoSpeech(1.5, 2)};
  const TimeSignal noise = WhiteNoise(12, 40000, 0.5);
  const std::vector<double> snrs{5.0, -5.0};
  const Enhancer identity = [](const TimeSignal& y) { return y; };
  const auto rows = EvaluateEnhancer(identity, clean, noise, "white", snrs, 3);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].snr_db, 5.0);
  EXPECT_EQ(rows[0].noise_type, "white");
  for (const EvalRow& r : rows) {
    EXPECT_EQ(r.elc_unprocessed, r.elc_enhanced);
    EXPECT_EQ(r.stoi_unprocessed, r.elc_unprocessed);
  }
  EXPECT_GT(rows[0].elc_unprocessed, rows[1].elc_unprocessed);

  // Mean over utterances of the per-utterance score.
  SplitSpec spec;
  spec.split = Split::kTest;
  spec.test_snrs_db = {5.0};
  spec.seed = 3;
  const auto mixes = MixUtterances(clean, noise, spec);
  const double expected = (ScoreElc(clean[0], mixes[0].noisy).mean + ScoreElc(clean[1], mixes[1].noisy).mean) / 2;
  EXPECT_NEAR(rows[0].elc_unprocessed, expected, 1e-15);
  EXPECT_THROW(EvaluateEnhancer(identity, {}, noise, "white", snrs, 3), InvalidArgument);
}

}  // namespace
}  // namespace astoi
