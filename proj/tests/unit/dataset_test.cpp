// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/dataset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "astoi/errors.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace astoi {
namespace {

using testing::TempDir;

TimeSignal WhiteNoise(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  return {oracle::RandomVector(rng, n), kWorkingRateHz};
}

EnvelopeMatrix RandomEnvelopes(std::mt19937_64& rng, int bands, int frames) {
  EnvelopeMatrix e(bands, frames);
  const auto v = oracle::RandomVector(rng, static_cast<std::size_t>(bands * frames), 0.0, 2.0);
  for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = v[static_cast<std::size_t>(i)];
  return e;
}

EnvelopeCorpus SmallCorpus(std::uint64_t seed, std::vector<int> frames, int bands = 3, int len = 4) {
  std::mt19937_64 rng(seed);
  EnvelopeCorpus c(len);
  for (int m : frames) c.Add({RandomEnvelopes(rng, bands, m), RandomEnvelopes(rng, bands, m), 1.0 * m});
  return c;
}

TEST(DrawMixSpecs, TrainDrawsInRangeAndIsStable) {
  SplitSpec spec;
  spec.seed = 5;
  const auto a = DrawMixSpecs(500, spec);
  const auto b = DrawMixSpecs(700, spec);
  double lo = 1e9, hi = -1e9;
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GE(a[i].snr_db, -5.0);
    EXPECT_LE(a[i].snr_db, 10.0);
    lo = std::min(lo, a[i].snr_db);
    hi = std::max(hi, a[i].snr_db);
    // Utterance i's mix depends only on (seed, i).
    EXPECT_EQ(a[i].snr_db, b[i].snr_db);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].split, Split::kTrain);
    seeds.insert(a[i].seed);
  }
  EXPECT_LT(lo, -4.0);
  EXPECT_GT(hi, 9.0);
  EXPECT_EQ(seeds.size(), a.size());
  spec.seed = 6;
  EXPECT_NE(DrawMixSpecs(1, spec)[0].snr_db, a[0].snr_db);
}

TEST(DrawMixSpecs, SplitsAreIndependentStreams) {
  SplitSpec train, val;
  val.split = Split::kValidation;
  EXPECT_NE(DrawMixSpecs(1, train)[0].seed, DrawMixSpecs(1, val)[0].seed);
}

TEST(DrawMixSpecs, TestCyclesSnrs) {
  SplitSpec spec;
  spec.split = Split::kTest;
  spec.test_snrs_db = {-5, 0, 5};
  const auto s = DrawMixSpecs(7, spec);
  const double expected[] = {-5, 0, 5, -5, 0, 5, -5};
  for (int i = 0; i < 7; ++i) EXPECT_EQ(s[static_cast<std::size_t>(i)].snr_db, expected[i]);
  spec.test_snrs_db.clear();
  EXPECT_THROW(DrawMixSpecs(1, spec), InvalidArgument);
  SplitSpec bad;
  bad.snr_min_db = 3;
  bad.snr_max_db = 1;
  EXPECT_THROW(DrawMixSpecs(1, bad), InvalidArgument);
}

TEST(MixUtterances, RespectsSpecs) {
  std::vector<TimeSignal> speech;
  for (std::uint64_t s = 0; s < 3; ++s) speech.push_back(SynthPseudoSpeech(1.5, s));
  const TimeSignal noise = WhiteNoise(1, 40000);
  SplitSpec spec;
  spec.seed = 3;
  const auto mixed = MixUtterances(speech, noise, spec);
  const auto specs = DrawMixSpecs(3, spec);
  ASSERT_EQ(mixed.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(mixed[i].clean, speech[i]);
    EXPECT_NEAR(MeasuredSnrDb(speech[i], mixed[i].noise), specs[i].snr_db, 1e-9);
    for (std::size_t n = 0; n < speech[i].size(); n += 101) {
      EXPECT_EQ(mixed[i].noisy.samples[n], speech[i].samples[n] + mixed[i].noise.samples[n]);
    }
  }
}

TEST(EnvelopeFeatures, LogOfWindowBandMajor) {
  std::mt19937_64 rng(1);
  const EnvelopeMatrix env = RandomEnvelopes(rng, 15, 40);
  std::vector<double> f(450);
  EnvelopeFeatures(env, 35, 30, f.data());
  for (int j = 0; j < 15; ++j) {
    for (int i = 0; i < 30; ++i) EXPECT_NEAR(f[static_cast<std::size_t>(j * 30 + i)], std::log(1.0 + env(j, 6 + i)), 1e-15);
  }
  EXPECT_THROW(EnvelopeFeatures(env, 28, 30, f.data()), InvalidArgument);
}

TEST(NormalizeFeatures, AppliesMeanAndStd) {
  FeatureNorm norm{Vector::Constant(3, 1.0), Vector::Constant(3, 2.0)};
  double f[] = {3.0, 1.0, -1.0};
  NormalizeFeatures(norm, f, 3);
  EXPECT_EQ(f[0], 1.0);
  EXPECT_EQ(f[1], 0.0);
  EXPECT_EQ(f[2], -1.0);
  NormalizeFeatures({}, f, 3);
  EXPECT_EQ(f[0], 1.0);
  EXPECT_THROW(NormalizeFeatures(norm, f, 2), InvalidArgument);
}

TEST(EnvelopeCorpus, WindowsAndSamples) {
  const EnvelopeCorpus c = SmallCorpus(2, {6, 3, 5});
  // Windows end at frames 3..5 of utterance 0 and 3..4 of utterance 2.
  ASSERT_EQ(c.num_windows(), 5u);
  EXPECT_EQ(c.num_samples(), 15u);
  EXPECT_EQ(c.Window(0), (std::pair<std::size_t, int>{0, 3}));
  EXPECT_EQ(c.Window(3), (std::pair<std::size_t, int>{2, 3}));
  const DatasetSample s = c.Sample(3 * 3 + 1);
  EXPECT_EQ(s.band, 1);
  EXPECT_EQ(s.clean_envelope.frame, 3);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(s.clean_envelope.values[static_cast<std::size_t>(i)], c.utterances()[2].clean(1, i));
    EXPECT_EQ(s.noisy_envelope.values[static_cast<std::size_t>(i)], c.utterances()[2].noisy(1, i));
  }
  ASSERT_EQ(s.noisy_input.size(), 12);
  EXPECT_NEAR(s.noisy_input[4 + 2], std::log1p(c.utterances()[2].noisy(1, 2)), 1e-15);
}

TEST(EnvelopeCorpus, RejectsInconsistentUtterances) {
  EnvelopeCorpus c(4);
  EXPECT_THROW(c.Add({Matrix::Zero(3, 5), Matrix::Zero(3, 6), 0}), InvalidArgument);
  c.Add({Matrix::Zero(3, 5), Matrix::Zero(3, 5), 0});
  EXPECT_THROW(c.Add({Matrix::Zero(2, 5), Matrix::Zero(2, 5), 0}), InvalidArgument);
}

TEST(FeatureNorm, MatchesTwoPassStatistics) {
  const EnvelopeCorpus c = SmallCorpus(3, {20, 11, 9});
  const FeatureNorm norm = ComputeFeatureNorm(c);
  ASSERT_EQ(norm.mean.size(), 12);
  std::vector<std::vector<double>> cols(12);
  for (std::size_t w = 0; w < c.num_windows(); ++w) {
    const DatasetSample s = c.Sample(w * 3);
    for (int d = 0; d < 12; ++d) cols[static_cast<std::size_t>(d)].push_back(s.noisy_input[d]);
  }
  for (int d = 0; d < 12; ++d) {
    const auto& v = cols[static_cast<std::size_t>(d)];
    const double m = oracle::Mean(v);
    EXPECT_NEAR(norm.mean[d], m, 1e-12);
    EXPECT_NEAR(norm.stddev[d], oracle::CenteredNorm(v) / std::sqrt(static_cast<double>(v.size())), 1e-10);
  }
}

TEST(FeatureNorm, ConstantDimensionGetsUnitStd) {
  EnvelopeCorpus c(2);
  c.Add({Matrix::Constant(1, 5, 0.5), Matrix::Constant(1, 5, 0.5), 0});
  const FeatureNorm n = ComputeFeatureNorm(c);
  EXPECT_EQ(n.stddev[0], 1.0);
  EXPECT_THROW(ComputeFeatureNorm(EnvelopeCorpus(2)), InvalidArgument);
}

TEST(EnvelopeTrainingData, BandAndJointViews) {
  const EnvelopeCorpus c = SmallCorpus(4, {7, 6});
  const FeatureNorm norm = ComputeFeatureNorm(c);
  const EnvelopeTrainingData band(c, norm, 2), joint(c, norm, kJointBand);
  EXPECT_EQ(band.size(), c.num_windows());
  EXPECT_EQ(band.input_dim(), 12);
  EXPECT_EQ(band.target_dim(), 4);
  EXPECT_EQ(joint.target_dim(), 12);
  const std::vector<std::size_t> idx{4, 0};
  Matrix in, x, y, jin, jx, jy;
  band.Gather(idx, in, x, y);
  joint.Gather(idx, jin, jx, jy);
  EXPECT_EQ(in, jin);
  for (int col = 0; col < 2; ++col) {
    const DatasetSample s = c.Sample(idx[static_cast<std::size_t>(col)] * 3 + 2, norm);
    EXPECT_TRUE(in.col(col).isApprox(s.noisy_input, 1e-14));
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(x(i, col), s.clean_envelope.values[static_cast<std::size_t>(i)]);
      EXPECT_EQ(y(i, col), s.noisy_envelope.values[static_cast<std::size_t>(i)]);
      EXPECT_EQ(jx(2 * 4 + i, col), x(i, col));
    }
  }
  EXPECT_THROW(EnvelopeTrainingData(c, norm, 3), InvalidArgument);
  FeatureNorm wrong{Vector::Zero(5), Vector::Ones(5)};
  EXPECT_THROW(EnvelopeTrainingData(c, wrong, 0), InvalidArgument);
}

TEST(BuildDataset, EnvelopesMatchDirectAnalysis) {
  std::vector<TimeSignal> speech{SynthPseudoSpeech(1.0, 1), SynthPseudoSpeech(1.2, 2)};
  const TimeSignal noise = WhiteNoise(2, 30000);
  const BandLayout layout = BuildBandLayout();
  SplitSpec spec;
  const EnvelopeCorpus c = BuildDataset(speech, noise, spec, layout);
  const auto mixed = MixUtterances(speech, noise, spec);
  ASSERT_EQ(c.utterances().size(), 2u);
  for (std::size_t u = 0; u < 2; ++u) {
    EXPECT_EQ(c.utterances()[u].clean, Envelopes(Analyze(speech[u]), layout));
    EXPECT_EQ(c.utterances()[u].noisy, Envelopes(Analyze(mixed[u].noisy), layout));
    EXPECT_EQ(c.utterances()[u].snr_db, mixed[u].mix.snr_db);
  }
  EXPECT_EQ(c.num_bands(), 15);
}

TEST(CorpusFile, RoundTripAndCorruption) {
  TempDir dir("dataset");
  const EnvelopeCorpus c = SmallCorpus(5, {8, 9, 4});
  SaveCorpus(c, dir / "c.astod");
  const EnvelopeCorpus back = LoadCorpus(dir / "c.astod");
  ASSERT_EQ(back.utterances().size(), 3u);
  EXPECT_EQ(back.envelope_len(), 4);
  EXPECT_EQ(back.num_windows(), c.num_windows());
  for (std::size_t u = 0; u < 3; ++u) {
    EXPECT_EQ(back.utterances()[u].clean, c.utterances()[u].clean);
    EXPECT_EQ(back.utterances()[u].noisy, c.utterances()[u].noisy);
    EXPECT_EQ(back.utterances()[u].snr_db, c.utterances()[u].snr_db);
  }
  {
    std::fstream f(dir / "c.astod", std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(40);
    f.put('\x7f');
  }
  EXPECT_THROW(LoadCorpus(dir / "c.astod"), FormatError);
  EXPECT_THROW(LoadCorpus(dir / "none.astod"), IoError);
  // A model file is not a corpus.
  SaveFeatureNorm(ComputeFeatureNorm(c), dir / "n.bin");
  EXPECT_THROW(LoadCorpus(dir / "n.bin"), FormatError);
}

TEST(FeatureNormFile, RoundTrip) {
  TempDir dir("dataset");
  const FeatureNorm n = ComputeFeatureNorm(SmallCorpus(6, {10}));
  SaveFeatureNorm(n, dir / "n.bin");
  EXPECT_EQ(LoadFeatureNorm(dir / "n.bin"), n);
}

TEST(SynthPseudoCorpus, DurationsAndDeterminism) {
  const auto a = SynthPseudoCorpus(0.5, 4.0, 9);
  EXPECT_GE(TotalSeconds(a), 30.0);
  EXPECT_LT(TotalSeconds(a), 35.1);
  for (const auto& u : a) {
    EXPECT_GE(u.duration_s(), 3.0 - 1e-9);
    EXPECT_LE(u.duration_s(), 5.0 + 1e-9);
  }
  const auto b = SynthPseudoCorpus(0.5, 4.0, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_NE(SynthPseudoCorpus(0.1, 4.0, 10)[0], a[0]);
}

TEST(SplitUtterances, FractionsAndPartition) {
  std::vector<TimeSignal> u;
  for (int i = 0; i < 20; ++i) u.push_back({std::vector<double>(10, i), kWorkingRateHz});
  const UtteranceSplit s = SplitUtterances(u, 0.1, 0.2, 3);
  EXPECT_EQ(s.test.size(), 4u);
  EXPECT_EQ(s.validation.size(), 2u);
  EXPECT_EQ(s.train.size(), 14u);
  std::set<double> seen;
  for (const auto* part : {&s.train, &s.validation, &s.test})
    for (const auto& x : *part) seen.insert(x.samples[0]);
  EXPECT_EQ(seen.size(), 20u);
  const UtteranceSplit again = SplitUtterances(u, 0.1, 0.2, 3);
  EXPECT_EQ(again.test, s.test);
  const UtteranceSplit tiny = SplitUtterances({u.begin(), u.begin() + 3}, 0.01, 0.01, 1);
  EXPECT_EQ(tiny.test.size(), 1u);
  EXPECT_EQ(tiny.validation.size(), 1u);
  EXPECT_THROW(SplitUtterances(u, 0.6, 0.5, 1), InvalidArgument);
}

TEST(SynthNoiseSplit, KindsAndLengths) {
  std::vector<TimeSignal> ref;
  for (std::uint64_t s = 0; s < 8; ++s) ref.push_back(SynthPseudoSpeech(4.0, s));
  for (const char* kind : {"ssn", "babble"}) {
    const NoiseSplit n = SynthNoiseSplit(kind, ref, 3.0, 1.0, 2.0, 1);
    EXPECT_EQ(n.train.size(), 30000u);
    EXPECT_EQ(n.validation.size(), 10000u);
    EXPECT_EQ(n.test.size(), 20000u);
  }
  EXPECT_THROW(SynthNoiseSplit("pink", ref, 1, 1, 1, 1), InvalidArgument);
}

TEST(Manifest, ReadWriteAndRelativePaths) {
  TempDir dir("dataset");
  {
    std::ofstream out(dir / "list.txt");
    out << "# header\n\na.wav\n  sub/b.wav  \n/abs/c.wav # trailing\n";
  }
  const auto paths = ReadManifest(dir / "list.txt");
  ASSERT_EQ(paths.size(), 3u);
  EXPECT_EQ(paths[0], dir.path() / "a.wav");
  EXPECT_EQ(paths[1], dir.path() / "sub/b.wav");
  EXPECT_EQ(paths[2], std::filesystem::path("/abs/c.wav"));
  WriteManifest(dir / "out.txt", paths);
  EXPECT_EQ(ReadManifest(dir / "out.txt"), paths);
  EXPECT_THROW(ReadManifest(dir / "missing.txt"), IoError);
}

}  // namespace
}  // namespace astoi
