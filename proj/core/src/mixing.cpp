// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/mixing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "astoi/errors.hpp"
#include "fft.hpp"

namespace astoi {

namespace {

constexpr double kEnvelopeTimeConstant = 0.03;
constexpr double kHangover = 0.2;
constexpr double kMarginDb = 15.9;
constexpr int kThresholds = 16;

constexpr int kSsnTaps = 512;
constexpr int kWelchSize = 512;
constexpr double kMinReferenceSeconds = 30.0;

double MeanSquare(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

void NormalizeRms(std::vector<double>& x) {
  const double rms = std::sqrt(MeanSquare(x));
  if (rms > 0.0) {
    for (double& v : x) v /= rms;
  }
}

// Welch estimate of the long-term power spectrum (Hann, 50% overlap).
std::vector<double> WelchSpectrum(const std::vector<double>& x, int nfft) {
  internal::RealFft& fft = internal::FftFor(nfft);
  std::vector<double> window(static_cast<std::size_t>(nfft));
  for (int n = 0; n < nfft; ++n) window[static_cast<std::size_t>(n)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / nfft);
  std::vector<double> psd(static_cast<std::size_t>(nfft / 2 + 1), 0.0);
  const std::size_t hop = static_cast<std::size_t>(nfft / 2);
  std::size_t frames = 0;
  for (std::size_t start = 0; start + static_cast<std::size_t>(nfft) <= x.size(); start += hop) {
    for (int n = 0; n < nfft; ++n) fft.time()[n] = x[start + static_cast<std::size_t>(n)] * window[static_cast<std::size_t>(n)];
    fft.Forward();
    for (int k = 0; k <= nfft / 2; ++k) {
      const double re = fft.freq()[k][0];
      const double im = fft.freq()[k][1];
      psd[static_cast<std::size_t>(k)] += re * re + im * im;
    }
    ++frames;
  }
  for (double& p : psd) p /= static_cast<double>(std::max<std::size_t>(frames, 1));
  return psd;
}

// Linear convolution y = x * h via FFT overlap-add, truncated to x.size().
std::vector<double> FftFilter(const std::vector<double>& x, const std::vector<double>& h) {
  const int block = 4096;
  const int nfft = 8192;
  internal::RealFft& fft = internal::FftFor(nfft);
  std::vector<double> hf_re(static_cast<std::size_t>(nfft / 2 + 1)), hf_im(hf_re.size());
  std::fill(fft.time(), fft.time() + nfft, 0.0);
  std::copy(h.begin(), h.end(), fft.time());
  fft.Forward();
  for (std::size_t k = 0; k < hf_re.size(); ++k) {
    hf_re[k] = fft.freq()[k][0];
    hf_im[k] = fft.freq()[k][1];
  }

  std::vector<double> y(x.size() + h.size(), 0.0);
  for (std::size_t start = 0; start < x.size(); start += block) {
    const std::size_t len = std::min<std::size_t>(block, x.size() - start);
    std::fill(fft.time(), fft.time() + nfft, 0.0);
    std::copy(x.begin() + static_cast<std::ptrdiff_t>(start),
              x.begin() + static_cast<std::ptrdiff_t>(start + len), fft.time());
    fft.Forward();
    for (std::size_t k = 0; k < hf_re.size(); ++k) {
      const double re = fft.freq()[k][0];
      const double im = fft.freq()[k][1];
      fft.freq()[k][0] = re * hf_re[k] - im * hf_im[k];
      fft.freq()[k][1] = re * hf_im[k] + im * hf_re[k];
    }
    fft.Inverse();
    const std::size_t span = std::min(y.size() - start, len + h.size());
    for (std::size_t n = 0; n < span; ++n) y[start + n] += fft.time()[n] / nfft;
  }
  y.resize(x.size());
  return y;
}

}  // namespace

double OverallLevelDb(const TimeSignal& signal) {
  if (signal.empty()) throw InvalidArgument("empty signal has no level");
  return 10.0 * std::log10(MeanSquare(signal.samples));
}

double ActiveSpeechLevel(const TimeSignal& speech) {
  if (speech.empty()) throw InvalidArgument("empty signal has no active level");
  double peak = 0.0;
  for (double v : speech.samples) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw InvalidArgument("all-silent signal has no active speech level");

  const double fs = speech.sample_rate_hz;
  const double g = std::exp(-1.0 / (fs * kEnvelopeTimeConstant));
  const auto hang_max = static_cast<long>(std::lround(kHangover * fs));

  // Threshold j is 2^-j relative to the peak.
  std::array<double, kThresholds> threshold{};
  std::array<long, kThresholds> active{};
  std::array<long, kThresholds> hang{};
  for (int j = 0; j < kThresholds; ++j) {
    threshold[static_cast<std::size_t>(j)] = std::ldexp(1.0, -j);
    hang[static_cast<std::size_t>(j)] = hang_max;
  }

  double p = 0.0, q = 0.0, energy = 0.0;
  for (double raw : speech.samples) {
    const double v = raw / peak;
    energy += v * v;
    p = g * p + (1.0 - g) * std::abs(v);
    q = g * q + (1.0 - g) * p;
    for (std::size_t j = 0; j < threshold.size(); ++j) {
      if (q >= threshold[j]) {
        ++active[j];
        hang[j] = 0;
      } else if (hang[j] < hang_max) {
        ++active[j];
        ++hang[j];
      }
    }
  }

  const double offset_db = 20.0 * std::log10(peak);
  const double overall = 10.0 * std::log10(energy / static_cast<double>(speech.size()));

  // Walk from the lowest threshold upwards until active level minus
  // threshold drops to the margin.
  double prev_level = 0.0, prev_delta = 0.0;
  bool have_prev = false;
  for (int j = kThresholds - 1; j >= 0; --j) {
    const auto idx = static_cast<std::size_t>(j);
    if (active[idx] == 0) break;
    const double level = 10.0 * std::log10(energy / static_cast<double>(active[idx]));
    const double delta = level - 20.0 * std::log10(threshold[idx]);
    if (delta <= kMarginDb) {
      if (!have_prev) return level + offset_db;
      const double t = (prev_delta - kMarginDb) / (prev_delta - delta);
      return prev_level + t * (level - prev_level) + offset_db;
    }
    prev_level = level;
    prev_delta = delta;
    have_prev = true;
  }
  // No crossing on the ladder: treat the whole signal as active.
  return (have_prev ? prev_level : overall) + offset_db;
}

Mixture MixAtSnr(const TimeSignal& speech, const TimeSignal& noise, double snr_db, std::uint64_t seed) {
  if (speech.empty()) throw InvalidArgument("empty speech signal");
  if (noise.size() < speech.size()) {
    throw InvalidArgument("noise (" + std::to_string(noise.size()) + " samples) is shorter than speech (" +
                          std::to_string(speech.size()) + ")");
  }
  if (noise.sample_rate_hz != speech.sample_rate_hz) throw InvalidArgument("speech and noise rates differ");
  if (!std::isfinite(snr_db)) throw InvalidArgument("SNR must be finite");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, noise.size() - speech.size());
  Mixture out;
  out.noise_offset = pick(rng);

  out.scaled_noise.sample_rate_hz = speech.sample_rate_hz;
  out.scaled_noise.samples.assign(noise.samples.begin() + static_cast<std::ptrdiff_t>(out.noise_offset),
                                  noise.samples.begin() + static_cast<std::ptrdiff_t>(out.noise_offset + speech.size()));
  const double noise_ms = MeanSquare(out.scaled_noise.samples);
  if (!(noise_ms > 0.0)) throw InvalidArgument("noise segment is silent");

  const double speech_level = ActiveSpeechLevel(speech);
  const double gain = std::sqrt(std::pow(10.0, (speech_level - snr_db) / 10.0) / noise_ms);
  for (double& v : out.scaled_noise.samples) v *= gain;

  out.mixture.sample_rate_hz = speech.sample_rate_hz;
  out.mixture.samples.resize(speech.size());
  for (std::size_t i = 0; i < speech.size(); ++i) {
    out.mixture.samples[i] = speech.samples[i] + out.scaled_noise.samples[i];
  }
  return out;
}

double MeasuredSnrDb(const TimeSignal& speech, const TimeSignal& scaled_noise) {
  return ActiveSpeechLevel(speech) - OverallLevelDb(scaled_noise);
}

TimeSignal SynthSsn(std::span<const TimeSignal> reference, double duration_s, std::uint64_t seed) {
  if (!(duration_s > 0.0)) throw InvalidArgument("duration must be positive");
  std::vector<double> pooled;
  for (const TimeSignal& s : reference) {
    if (s.sample_rate_hz != kWorkingRateHz) throw InvalidArgument("reference speech must be at 10 kHz");
    pooled.insert(pooled.end(), s.samples.begin(), s.samples.end());
  }
  if (static_cast<double>(pooled.size()) < kMinReferenceSeconds * kWorkingRateHz) {
    throw InvalidArgument("speech-shaped noise needs at least 30 s of reference material");
  }

  // Zero-phase response from the long-term amplitude spectrum, shifted to
  // causal linear phase and Hann-windowed.
  const std::vector<double> psd = WelchSpectrum(pooled, kWelchSize);
  internal::RealFft& fft = internal::FftFor(kSsnTaps);
  for (std::size_t k = 0; k < psd.size(); ++k) {
    fft.freq()[k][0] = std::sqrt(psd[k]);
    fft.freq()[k][1] = 0.0;
  }
  fft.Inverse();
  std::vector<double> taps(kSsnTaps);
  for (int n = 0; n < kSsnTaps; ++n) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / kSsnTaps);
    taps[static_cast<std::size_t>(n)] = fft.time()[(n + kSsnTaps / 2) % kSsnTaps] * w;
  }

  const auto length = static_cast<std::size_t>(std::llround(duration_s * kWorkingRateHz));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> white(length + kSsnTaps);
  for (double& v : white) v = gauss(rng);
  std::vector<double> shaped = FftFilter(white, taps);

  TimeSignal out;
  out.samples.assign(shaped.begin() + kSsnTaps, shaped.end());
  NormalizeRms(out.samples);
  return out;
}

TimeSignal SynthBabble(std::span<const TimeSignal> reference, int num_speakers, double duration_s,
                       std::uint64_t seed) {
  if (num_speakers <= 0) throw InvalidArgument("need at least one speaker");
  if (!(duration_s > 0.0)) throw InvalidArgument("duration must be positive");
  if (reference.size() < static_cast<std::size_t>(num_speakers)) {
    throw InvalidArgument("babble with " + std::to_string(num_speakers) + " speakers needs as many utterances, got " +
                          std::to_string(reference.size()));
  }
  std::vector<std::vector<double>> utterances;
  for (const TimeSignal& s : reference) {
    if (s.sample_rate_hz != kWorkingRateHz) throw InvalidArgument("reference speech must be at 10 kHz");
    if (s.empty()) throw InvalidArgument("empty reference utterance");
    utterances.push_back(s.samples);
    NormalizeRms(utterances.back());
  }

  const auto length = static_cast<std::size_t>(std::llround(duration_s * kWorkingRateHz));
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(utterances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  TimeSignal out;
  out.samples.assign(length, 0.0);
  for (int s = 0; s < num_speakers; ++s) {
    // Speaker s takes every num_speakers-th utterance of the shuffled list,
    // starting at position s.
    std::size_t pos = static_cast<std::size_t>(s);
    std::uniform_int_distribution<std::size_t> start_pick(0, utterances[order[pos]].size() - 1);
    std::size_t skip = start_pick(rng);
    std::size_t written = 0;
    while (written < length) {
      const std::vector<double>& u = utterances[order[pos % order.size()]];
      for (std::size_t i = skip; i < u.size() && written < length; ++i) out.samples[written++] += u[i];
      skip = 0;
      pos += static_cast<std::size_t>(num_speakers);
    }
  }
  NormalizeRms(out.samples);
  return out;
}

NoiseSplit SplitNoise(const TimeSignal& noise, double train_s, double validation_s, double test_s) {
  if (train_s < 0.0 || validation_s < 0.0 || test_s < 0.0) throw InvalidArgument("negative split duration");
  const double fs = noise.sample_rate_hz;
  const auto n_train = static_cast<std::size_t>(std::llround(train_s * fs));
  const auto n_val = static_cast<std::size_t>(std::llround(validation_s * fs));
  const auto n_test = static_cast<std::size_t>(std::llround(test_s * fs));
  if (n_train + n_val + n_test > noise.size()) {
    throw InvalidArgument("noise of " + std::to_string(noise.duration_s()) + " s is too short for the split");
  }
  auto segment = [&](std::size_t begin, std::size_t len) {
    TimeSignal s;
    s.sample_rate_hz = noise.sample_rate_hz;
    s.samples.assign(noise.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     noise.samples.begin() + static_cast<std::ptrdiff_t>(begin + len));
    return s;
  };
  return {segment(0, n_train), segment(n_train, n_val), segment(n_train + n_val, n_test)};
}

}  // namespace astoi
