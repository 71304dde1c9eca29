// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/baseline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "astoi/errors.hpp"
#include "astoi/pipeline.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace astoi {
namespace {

using testing::TempDir;

TimeSignal WhiteNoise(std::uint64_t seed, std::size_t n, double amp) {
  std::mt19937_64 rng(seed);
  return {oracle::RandomVector(rng, n, -amp, amp), kWorkingRateHz};
}

StsaSystem SmallSystem(std::uint64_t seed, int ctx = 4, int outs = 2) {
  StsaSystem s;
  s.context_frames = ctx;
  s.output_frames = outs;
  ModelShape shape;
  shape.input_dim = ctx * 129;
  shape.hidden = {6};
  shape.output_dim = outs * 129;
  shape.block_len = 129;
  shape.objective = Objective::kSpectralMse;
  s.model = InitModel(shape, seed);
  return s;
}

TEST(StsaFeatures, ContextWithZeroPadding) {
  Matrix log_noisy(6, 3);
  for (int m = 0; m < 6; ++m)
    for (int k = 0; k < 3; ++k) log_noisy(m, k) = 10 * m + k + 1;
  std::vector<double> f(12);
  StsaFeatures(log_noisy, 1, 4, f.data());
  // Frames -2, -1 are zero; then frames 0 and 1.
  const std::vector<double> expected{0, 0, 0, 0, 0, 0, 1, 2, 3, 11, 12, 13};
  EXPECT_EQ(f, expected);
  StsaFeatures(log_noisy, 5, 4, f.data());
  EXPECT_EQ(f[0], 21.0);
  EXPECT_EQ(f[11], 53.0);
}

TEST(StsaCoverage, CountsEstimatesPerFrame) {
  EXPECT_EQ(StsaCoverage(6, 3), (std::vector<int>{1, 2, 3, 3, 2, 1}));
  EXPECT_EQ(StsaCoverage(3, 3), (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(StsaCoverage(4, 1), (std::vector<int>{1, 1, 1, 1}));
}

TEST(StsaTrainingData, TargetsAreFrameBlocks) {
  StsaCorpus c;
  std::mt19937_64 rng(1);
  for (int u = 0; u < 2; ++u) {
    Matrix x(7, 129), y(7, 129);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x.data()[i] = oracle::RandomVector(rng, 1, 0, 1)[0];
      y.data()[i] = oracle::RandomVector(rng, 1, 0, 1)[0];
    }
    c.clean.push_back(x);
    c.noisy.push_back(y);
  }
  const StsaTrainingData d(c, {}, 4, 2);
  EXPECT_EQ(d.size(), 12u);  // steps 1..6 of each utterance
  EXPECT_EQ(d.input_dim(), 4 * 129);
  EXPECT_EQ(d.target_dim(), 2 * 129);
  Matrix in, x, y;
  const std::vector<std::size_t> idx{7};  // utterance 1, step 2
  d.Gather(idx, in, x, y);
  for (int k = 0; k < 129; ++k) {
    EXPECT_EQ(x(k, 0), c.clean[1](1, k));
    EXPECT_EQ(x(129 + k, 0), c.clean[1](2, k));
    EXPECT_EQ(y(129 + k, 0), c.noisy[1](2, k));
    EXPECT_NEAR(in(3 * 129 + k, 0), std::log1p(c.noisy[1](2, k)), 1e-15);
    EXPECT_EQ(in(k, 0), 0.0);
  }
  EXPECT_THROW(StsaTrainingData(c, {}, 2, 3), InvalidArgument);
}

TEST(StsaGains, AveragesOverlappingEstimates) {
  const StsaSystem s = SmallSystem(2);
  const Spectrogram spec = Analyze(WhiteNoise(3, 2000, 0.3));
  const Matrix g = StsaGains(s, spec);
  ASSERT_EQ(g.rows(), spec.num_frames());
  ASSERT_EQ(g.cols(), 129);
  // Recompute frame 3 from the raw network outputs of steps 3 and 4.
  const Matrix log_noisy = spec.magnitude.unaryExpr([](double v) { return std::log1p(v); });
  Matrix f(4 * 129, 2);
  StsaFeatures(log_noisy, 3, 4, f.col(0).data());
  StsaFeatures(log_noisy, 4, 4, f.col(1).data());
  const Matrix out = Forward(s.model, f, Mode::kInfer);
  for (int k = 0; k < 129; ++k) EXPECT_NEAR(g(3, k), 0.5 * (out(129 + k, 0) + out(k, 1)), 1e-15);
  EXPECT_GT(g.minCoeff(), 0.0);
  EXPECT_LT(g.maxCoeff(), 1.0);
}

TEST(StsaEnhance, LengthAndErrors) {
  const StsaSystem s = SmallSystem(4);
  const TimeSignal y = WhiteNoise(5, 3333, 0.3);
  EXPECT_EQ(StsaEnhance(s, y).size(), y.size());
  StsaSystem bad = SmallSystem(4, 5, 2);
  bad.context_frames = 4;
  EXPECT_THROW(StsaEnhance(bad, y), InvalidArgument);
}

TEST(TrainStsa, LearnsToAttenuateNoise) {
  std::vector<TimeSignal> clean, noisy;
  for (std::uint64_t u = 0; u < 6; ++u) {
    clean.push_back(SynthPseudoSpeech(2.0, 50 + u));
    const Mixture m = MixAtSnr(clean.back(), WhiteNoise(60 + u, 20000, 1.0), 0.0, u);
    noisy.push_back(m.mixture);
  }
  const StsaCorpus train = StsaCorpusFromPairs({clean.data(), 5}, {noisy.data(), 5});
  const StsaCorpus val = StsaCorpusFromPairs({clean.data() + 5, 1}, {noisy.data() + 5, 1});
  StsaTrainOptions o;
  o.hidden = {32};
  o.context_frames = 5;
  o.output_frames = 2;
  o.train.max_epochs = 8;
  o.train.minibatch = 32;
  o.train.initial_lr_per_sample = 2e-3;
  const StsaTrainResult r = TrainStsa(train, val, o);
  ASSERT_FALSE(r.report.epochs.empty());
  EXPECT_LT(r.report.epochs.back().validation_cost, r.report.epochs.front().validation_cost * 1.0001);
  EXPECT_EQ(r.system.model.objective, Objective::kSpectralMse);
  const TimeSignal enhanced = StsaEnhance(r.system, noisy[5]);
  EXPECT_GT(ScoreElc(clean[5], enhanced).mean, ScoreElc(clean[5], noisy[5]).mean - 0.05);
}

TEST(StsaFiles, RoundTrip) {
  TempDir dir("baseline");
  StsaSystem s = SmallSystem(7);
  s.feature_norm.mean = Vector::Constant(4 * 129, 0.1);
  s.feature_norm.stddev = Vector::Constant(4 * 129, 0.7);
  SaveStsa(s, dir.path());
  const StsaSystem back = LoadStsa(dir.path());
  EXPECT_TRUE(back.model == s.model);
  EXPECT_EQ(back.feature_norm, s.feature_norm);
  EXPECT_EQ(back.context_frames, 4);
  EXPECT_EQ(back.output_frames, 2);
  const TimeSignal y = WhiteNoise(8, 3000, 0.3);
  EXPECT_EQ(StsaEnhance(back, y), StsaEnhance(s, y));
  EXPECT_THROW(LoadStsa(dir / "nope"), IoError);
}

TEST(StsaCorpusFromPairs, Validates) {
  const TimeSignal a = WhiteNoise(1, 1000, 0.1), b = WhiteNoise(2, 1001, 0.1);
  EXPECT_THROW(StsaCorpusFromPairs(std::vector<TimeSignal>{a}, std::vector<TimeSignal>{b}), InvalidArgument);
  EXPECT_THROW(StsaCorpusFromPairs(std::vector<TimeSignal>{a}, std::vector<TimeSignal>{}), InvalidArgument);
  const StsaCorpus c = StsaCorpusFromPairs(std::vector<TimeSignal>{a}, std::vector<TimeSignal>{a});
  EXPECT_EQ(c.clean[0], Analyze(a).magnitude);
}

}  // namespace
}  // namespace astoi
