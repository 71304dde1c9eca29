// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/stft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "astoi/errors.hpp"
#include "fft.hpp"

namespace astoi {

void StftConfig::Validate() const {
  if (window_len <= 0 || hop <= 0 || fft_size <= 0) {
    throw InvalidArgument("STFT sizes must be positive");
  }
  if (fft_size < window_len) throw InvalidArgument("fft_size must be >= window_len");
  if (fft_size % 2 != 0) throw InvalidArgument("fft_size must be even");
  if (window_len % 2 != 0 || hop * 2 != window_len) {
    throw InvalidArgument("hop must equal window_len / 2");
  }
}

std::vector<double> HannWindow(int len) {
  std::vector<double> w(static_cast<std::size_t>(len));
  for (int n = 0; n < len; ++n) {
    w[static_cast<std::size_t>(n)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / len);
  }
  return w;
}

std::size_t NumFrames(std::size_t length, const StftConfig& config) {
  const auto win = static_cast<std::size_t>(config.window_len);
  const auto hop = static_cast<std::size_t>(config.hop);
  if (length < win) return 0;
  return (length - win + hop - 1) / hop + 1;
}

Spectrogram Analyze(const TimeSignal& signal, const StftConfig& config) {
  config.Validate();
  if (signal.size() < static_cast<std::size_t>(config.window_len)) {
    throw InvalidArgument("signal of " + std::to_string(signal.size()) +
                          " samples is shorter than one STFT window");
  }
  const std::size_t frames = NumFrames(signal.size(), config);
  const int bins = config.num_bins();
  const std::vector<double> window = HannWindow(config.window_len);

  Spectrogram spec;
  spec.config = config;
  spec.sample_rate_hz = signal.sample_rate_hz;
  spec.signal_length = signal.size();
  spec.magnitude.resize(static_cast<Eigen::Index>(frames), bins);
  spec.phase.resize(static_cast<Eigen::Index>(frames), bins);

  internal::RealFft& fft = internal::FftFor(config.fft_size);
  double* buf = fft.time();
  for (std::size_t m = 0; m < frames; ++m) {
    const std::size_t start = m * static_cast<std::size_t>(config.hop);
    for (int n = 0; n < config.fft_size; ++n) {
      const std::size_t idx = start + static_cast<std::size_t>(n);
      buf[n] = (n < config.window_len && idx < signal.size())
                   ? signal.samples[idx] * window[static_cast<std::size_t>(n)]
                   : 0.0;
    }
    fft.Forward();
    const fftw_complex* out = fft.freq();
    const auto row = static_cast<Eigen::Index>(m);
    for (int k = 0; k < bins; ++k) {
      const std::complex<double> c(out[k][0], out[k][1]);
      spec.magnitude(row, k) = std::abs(c);
      spec.phase(row, k) = std::arg(c);
    }
  }
  return spec;
}

TimeSignal Synthesize(const Spectrogram& spec) {
  const StftConfig& config = spec.config;
  config.Validate();
  if (spec.magnitude.rows() != spec.phase.rows() || spec.magnitude.cols() != spec.phase.cols()) {
    throw InvalidArgument("magnitude and phase shapes differ");
  }
  if (spec.magnitude.cols() != config.num_bins()) {
    throw InvalidArgument("spectrogram bin count does not match fft_size");
  }
  const auto frames = static_cast<std::size_t>(spec.magnitude.rows());
  const auto hop = static_cast<std::size_t>(config.hop);
  const auto win = static_cast<std::size_t>(config.window_len);
  std::size_t length = spec.signal_length;
  if (length == 0 && frames > 0) length = (frames - 1) * hop + win;

  const std::vector<double> window = HannWindow(config.window_len);
  std::vector<double> acc((frames > 0 ? (frames - 1) * hop + win : 0), 0.0);
  std::vector<double> norm(acc.size(), 0.0);

  internal::RealFft& fft = internal::FftFor(config.fft_size);
  const double scale = 1.0 / config.fft_size;
  for (std::size_t m = 0; m < frames; ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    fftw_complex* in = fft.freq();
    for (int k = 0; k < config.num_bins(); ++k) {
      const std::complex<double> c = std::polar(spec.magnitude(row, k), spec.phase(row, k));
      in[k][0] = c.real();
      in[k][1] = c.imag();
    }
    // The c2r transform assumes real DC and Nyquist bins.
    in[0][1] = 0.0;
    in[config.fft_size / 2][1] = 0.0;
    fft.Inverse();
    const double* frame = fft.time();
    const std::size_t start = m * hop;
    for (std::size_t n = 0; n < win; ++n) {
      acc[start + n] += frame[n] * scale * window[n];
      norm[start + n] += window[n] * window[n];
    }
  }

  TimeSignal out;
  out.sample_rate_hz = spec.sample_rate_hz;
  out.samples.assign(length, 0.0);
  const std::size_t usable = std::min(length, acc.size());
  for (std::size_t n = 0; n < usable; ++n) {
    out.samples[n] = norm[n] > 0.0 ? acc[n] / norm[n] : 0.0;
  }
  return out;
}

Spectrogram ApplyGain(const Spectrogram& spec, const Matrix& gains) {
  if (gains.rows() != spec.magnitude.rows() || gains.cols() != spec.magnitude.cols()) {
    throw InvalidArgument("gain matrix shape does not match spectrogram");
  }
  if (!gains.allFinite() || (gains.array() < 0.0).any()) {
    throw InvalidArgument("gains must be finite and non-negative");
  }
  Spectrogram out = spec;
  out.magnitude = spec.magnitude.cwiseProduct(gains);
  return out;
}

}  // namespace astoi
