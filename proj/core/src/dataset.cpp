// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "astoi/binary_io.hpp"
#include "astoi/errors.hpp"
#include "astoi/mixing.hpp"

namespace astoi {

namespace {

constexpr char kCorpusMagic[] = "ASTOD";
constexpr char kNormMagic[] = "ASTON";
constexpr std::uint32_t kPackVersion = 1;

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

std::vector<MixSpec> DrawMixSpecs(std::size_t count, const SplitSpec& spec) {
  if (spec.split == Split::kTest && spec.test_snrs_db.empty()) {
    throw InvalidArgument("test split needs an explicit SNR list");
  }
  if (spec.split != Split::kTest && !(spec.snr_min_db <= spec.snr_max_db)) {
    throw InvalidArgument("invalid SNR range");
  }
  std::vector<MixSpec> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(DeriveSeed(spec.seed, i, static_cast<std::uint64_t>(spec.split)));
    MixSpec& m = out[i];
    m.split = spec.split;
    m.noise_source = spec.noise_source;
    if (spec.split == Split::kTest) {
      m.snr_db = spec.test_snrs_db[i % spec.test_snrs_db.size()];
    } else {
      m.snr_db = std::uniform_real_distribution<double>(spec.snr_min_db, spec.snr_max_db)(rng);
    }
    m.seed = rng();
  }
  return out;
}

std::vector<MixedUtterance> MixUtterances(std::span<const TimeSignal> speech, const TimeSignal& noise,
                                          const SplitSpec& spec) {
  const std::vector<MixSpec> specs = DrawMixSpecs(speech.size(), spec);
  std::vector<MixedUtterance> out;
  out.reserve(speech.size());
  for (std::size_t i = 0; i < speech.size(); ++i) {
    Mixture mix = MixAtSnr(speech[i], noise, specs[i].snr_db, specs[i].seed);
    out.push_back({speech[i], std::move(mix.mixture), std::move(mix.scaled_noise), specs[i]});
  }
  return out;
}

void EnvelopeFeatures(const EnvelopeMatrix& noisy, int frame, int envelope_len, double* out) {
  if (frame < envelope_len - 1 || frame >= noisy.cols()) throw InvalidArgument("frame lacks envelope context");
  const Eigen::Index first = frame - envelope_len + 1;
  for (Eigen::Index j = 0; j < noisy.rows(); ++j) {
    for (int i = 0; i < envelope_len; ++i) out[j * envelope_len + i] = std::log1p(noisy(j, first + i));
  }
}

void NormalizeFeatures(const FeatureNorm& norm, double* features, Eigen::Index dim) {
  if (norm.empty()) return;
  if (norm.mean.size() != dim || norm.stddev.size() != dim) {
    throw InvalidArgument("feature normalization has the wrong dimension");
  }
  for (Eigen::Index i = 0; i < dim; ++i) features[i] = (features[i] - norm.mean[i]) / norm.stddev[i];
}

void EnvelopeCorpus::Add(UtteranceEnvelopes utterance) {
  if (utterance.clean.rows() != utterance.noisy.rows() || utterance.clean.cols() != utterance.noisy.cols()) {
    throw InvalidArgument("clean and noisy envelopes differ in shape");
  }
  if (!utterances_.empty() && utterance.clean.rows() != utterances_.front().clean.rows()) {
    throw InvalidArgument("utterances disagree in band count");
  }
  const std::size_t index = utterances_.size();
  for (Eigen::Index m = envelope_len_ - 1; m < utterance.clean.cols(); ++m) {
    windows_.emplace_back(index, static_cast<int>(m));
  }
  utterances_.push_back(std::move(utterance));
}

int EnvelopeCorpus::num_bands() const noexcept {
  return utterances_.empty() ? 0 : static_cast<int>(utterances_.front().clean.rows());
}

DatasetSample EnvelopeCorpus::Sample(std::size_t i, const FeatureNorm& norm) const {
  const auto bands = static_cast<std::size_t>(num_bands());
  const auto [utt, frame] = windows_.at(i / bands);
  const UtteranceEnvelopes& u = utterances_[utt];
  DatasetSample s;
  s.band = static_cast<int>(i % bands);
  s.noisy_input.resize(num_bands() * envelope_len_);
  EnvelopeFeatures(u.noisy, frame, envelope_len_, s.noisy_input.data());
  NormalizeFeatures(norm, s.noisy_input.data(), s.noisy_input.size());
  s.clean_envelope = FrameEnvelope(u.clean, s.band, frame, envelope_len_);
  s.noisy_envelope = FrameEnvelope(u.noisy, s.band, frame, envelope_len_);
  return s;
}

FeatureNorm ComputeFeatureNorm(const EnvelopeCorpus& corpus) {
  const Eigen::Index dim = corpus.num_bands() * corpus.envelope_len();
  if (corpus.num_windows() == 0) throw InvalidArgument("cannot normalize features of an empty corpus");
  Vector sum = Vector::Zero(dim);
  Vector sum_sq = Vector::Zero(dim);
  Vector f(dim);
  for (std::size_t w = 0; w < corpus.num_windows(); ++w) {
    const auto [utt, frame] = corpus.Window(w);
    EnvelopeFeatures(corpus.utterances()[utt].noisy, frame, corpus.envelope_len(), f.data());
    sum += f;
    sum_sq += f.cwiseProduct(f);
  }
  const auto n = static_cast<double>(corpus.num_windows());
  FeatureNorm norm;
  norm.mean = sum / n;
  norm.stddev = (sum_sq / n - norm.mean.cwiseProduct(norm.mean)).cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (norm.stddev[i] < 1e-8) norm.stddev[i] = 1.0;
  }
  return norm;
}

EnvelopeCorpus CorpusFromMixtures(std::span<const MixedUtterance> mixtures, const BandLayout& layout,
                                  const StftConfig& stft, int envelope_len) {
  EnvelopeCorpus corpus(envelope_len);
  for (const MixedUtterance& m : mixtures) {
    UtteranceEnvelopes u;
    u.clean = Envelopes(Analyze(m.clean, stft), layout);
    u.noisy = Envelopes(Analyze(m.noisy, stft), layout);
    u.snr_db = m.mix.snr_db;
    corpus.Add(std::move(u));
  }
  return corpus;
}

EnvelopeCorpus BuildDataset(std::span<const TimeSignal> speech, const TimeSignal& noise, const SplitSpec& spec,
                            const BandLayout& layout, const StftConfig& stft) {
  const std::vector<MixedUtterance> mixtures = MixUtterances(speech, noise, spec);
  return CorpusFromMixtures(mixtures, layout, stft);
}

EnvelopeTrainingData::EnvelopeTrainingData(const EnvelopeCorpus& corpus, FeatureNorm norm, int band)
    : corpus_(&corpus), norm_(std::move(norm)), band_(band) {
  if (band != kJointBand && (band < 0 || band >= corpus.num_bands())) {
    throw InvalidArgument("band index out of range");
  }
  if (!norm_.empty() && norm_.mean.size() != input_dim()) {
    throw InvalidArgument("feature normalization does not match the corpus");
  }
  log_noisy_.reserve(corpus.utterances().size());
  for (const UtteranceEnvelopes& u : corpus.utterances()) log_noisy_.push_back(u.noisy.unaryExpr([](double v) { return std::log1p(v); }));
}

int EnvelopeTrainingData::target_dim() const {
  return band_ == kJointBand ? corpus_->num_bands() * corpus_->envelope_len() : corpus_->envelope_len();
}

void EnvelopeTrainingData::Gather(std::span<const std::size_t> indices, Matrix& inputs, Matrix& clean,
                                  Matrix& noisy) const {
  const auto b = static_cast<Eigen::Index>(indices.size());
  const int n = corpus_->envelope_len();
  inputs.resize(input_dim(), b);
  clean.resize(target_dim(), b);
  noisy.resize(target_dim(), b);
  const int first_band = band_ == kJointBand ? 0 : band_;
  const int last_band = band_ == kJointBand ? corpus_->num_bands() : band_ + 1;
  for (Eigen::Index c = 0; c < b; ++c) {
    const auto [utt, frame] = corpus_->Window(indices[static_cast<std::size_t>(c)]);
    const UtteranceEnvelopes& u = corpus_->utterances()[utt];
    const Matrix& log_noisy = log_noisy_[utt];
    double* in = inputs.col(c).data();
    for (Eigen::Index j = 0; j < log_noisy.rows(); ++j) {
      for (int i = 0; i < n; ++i) in[j * n + i] = log_noisy(j, frame - n + 1 + i);
    }
    NormalizeFeatures(norm_, in, inputs.rows());
    Eigen::Index row = 0;
    for (int j = first_band; j < last_band; ++j) {
      for (int i = 0; i < n; ++i, ++row) {
        clean(row, c) = u.clean(j, frame - n + 1 + i);
        noisy(row, c) = u.noisy(j, frame - n + 1 + i);
      }
    }
  }
}

// Payload: u32 envelope_len, u32 bands, u64 utterances, then per utterance
// u64 frames, f64 snr, clean (row-major J x M), noisy (row-major J x M).
void SaveCorpus(const EnvelopeCorpus& corpus, const std::filesystem::path& path) {
  BinaryWriter out(std::string_view(kCorpusMagic, 5), kPackVersion);
  out.U32(static_cast<std::uint32_t>(corpus.envelope_len()));
  out.U32(static_cast<std::uint32_t>(corpus.num_bands()));
  out.U64(corpus.utterances().size());
  for (const UtteranceEnvelopes& u : corpus.utterances()) {
    out.U64(static_cast<std::uint64_t>(u.clean.cols()));
    out.F64(u.snr_db);
    out.RowMajor(u.clean);
    out.RowMajor(u.noisy);
  }
  out.Save(path);
}

EnvelopeCorpus LoadCorpus(const std::filesystem::path& path) {
  BinaryReader in(path, std::string_view(kCorpusMagic, 5), kPackVersion);
  const auto len = static_cast<int>(in.U32());
  const auto bands = static_cast<Eigen::Index>(in.U32());
  const std::uint64_t count = in.U64();
  if (len <= 0 || bands <= 0 || bands > 1024) {
    throw FormatError(FormatError::Kind::kMalformed, "corpus '" + path.string() + "' has bad dimensions");
  }
  EnvelopeCorpus corpus(len);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto frames = static_cast<Eigen::Index>(in.U64());
    if (frames > (Eigen::Index{1} << 28)) {
      throw FormatError(FormatError::Kind::kMalformed, "corpus '" + path.string() + "' has bad frame count");
    }
    UtteranceEnvelopes u;
    u.snr_db = in.F64();
    u.clean = in.RowMajor(bands, frames);
    u.noisy = in.RowMajor(bands, frames);
    corpus.Add(std::move(u));
  }
  if (!in.AtEnd()) throw FormatError(FormatError::Kind::kMalformed, "trailing data in '" + path.string() + "'");
  return corpus;
}

void SaveFeatureNorm(const FeatureNorm& norm, const std::filesystem::path& path) {
  BinaryWriter out(std::string_view(kNormMagic, 5), kPackVersion);
  out.U32(static_cast<std::uint32_t>(norm.mean.size()));
  out.Doubles(norm.mean.data(), static_cast<std::size_t>(norm.mean.size()));
  out.Doubles(norm.stddev.data(), static_cast<std::size_t>(norm.stddev.size()));
  out.Save(path);
}

FeatureNorm LoadFeatureNorm(const std::filesystem::path& path) {
  BinaryReader in(path, std::string_view(kNormMagic, 5), kPackVersion);
  const auto dim = static_cast<Eigen::Index>(in.U32());
  if (dim > (Eigen::Index{1} << 24)) {
    throw FormatError(FormatError::Kind::kMalformed, "bad feature dimension in '" + path.string() + "'");
  }
  FeatureNorm norm;
  norm.mean.resize(dim);
  norm.stddev.resize(dim);
  in.Doubles(norm.mean.data(), static_cast<std::size_t>(dim));
  in.Doubles(norm.stddev.data(), static_cast<std::size_t>(dim));
  if (!in.AtEnd()) throw FormatError(FormatError::Kind::kMalformed, "trailing data in '" + path.string() + "'");
  return norm;
}

std::vector<TimeSignal> SynthPseudoCorpus(double minutes, double utterance_s, std::uint64_t seed) {
  if (!(minutes > 0.0) || !(utterance_s > 0.0)) throw InvalidArgument("corpus and utterance durations must be positive");
  std::vector<TimeSignal> out;
  double total = 0.0;
  for (std::uint64_t i = 0; total < minutes * 60.0; ++i) {
    std::mt19937_64 rng(DeriveSeed(seed, i, 0x5053));
    const double d = utterance_s * std::uniform_real_distribution<double>(0.75, 1.25)(rng);
    out.push_back(SynthPseudoSpeech(d, rng()));
    total += out.back().duration_s();
  }
  return out;
}

UtteranceSplit SplitUtterances(std::vector<TimeSignal> utterances, double validation_fraction,
                               double test_fraction, std::uint64_t seed) {
  if (validation_fraction < 0.0 || test_fraction < 0.0 || validation_fraction + test_fraction >= 1.0) {
    throw InvalidArgument("split fractions must be non-negative and sum below 1");
  }
  const std::size_t n = utterances.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(DeriveSeed(seed, 0, 0x53504c));
  std::shuffle(order.begin(), order.end(), rng);

  auto count = [n](double f) {
    auto c = static_cast<std::size_t>(std::llround(f * static_cast<double>(n)));
    if (f > 0.0 && n >= 3) c = std::max<std::size_t>(c, 1);
    return c;
  };
  const std::size_t n_test = count(test_fraction);
  const std::size_t n_val = count(validation_fraction);
  if (n_test + n_val >= n) throw InvalidArgument("too few utterances to split");

  UtteranceSplit split;
  for (std::size_t k = 0; k < n; ++k) {
    TimeSignal& u = utterances[order[k]];
    if (k < n_test) {
      split.test.push_back(std::move(u));
    } else if (k < n_test + n_val) {
      split.validation.push_back(std::move(u));
    } else {
      split.train.push_back(std::move(u));
    }
  }
  return split;
}

NoiseSplit SynthNoiseSplit(const std::string& kind, std::span<const TimeSignal> reference, double train_s,
                           double validation_s, double test_s, std::uint64_t seed, int babble_speakers) {
  const double total = train_s + validation_s + test_s + 1.0;  // slack for rounding
  TimeSignal noise;
  if (kind == "ssn") {
    noise = SynthSsn(reference, total, seed);
  } else if (kind == "babble") {
    noise = SynthBabble(reference, babble_speakers, total, seed);
  } else {
    throw InvalidArgument("unknown noise type '" + kind + "'");
  }
  return SplitNoise(noise, train_s, validation_s, test_s);
}

double TotalSeconds(std::span<const TimeSignal> signals) {
  double s = 0.0;
  for (const TimeSignal& x : signals) s += x.duration_s();
  return s;
}

std::vector<std::filesystem::path> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::vector<std::filesystem::path> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::filesystem::path entry = line.substr(first, last - first + 1);
    if (entry.is_relative()) entry = path.parent_path() / entry;
    out.push_back(entry);
  }
  return out;
}

void WriteManifest(const std::filesystem::path& path, std::span<const std::filesystem::path> entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  for (const auto& e : entries) out << e.string() << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace astoi
