// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "astoi/octave.hpp"

#include <cmath>
#include <string>

#include "astoi/errors.hpp"

namespace astoi {

BandLayout BuildBandLayout(int fft_size, int sample_rate_hz, int num_bands, double first_center_hz) {
  if (fft_size <= 0 || sample_rate_hz <= 0 || num_bands <= 0 || !(first_center_hz > 0.0)) {
    throw InvalidArgument("band layout parameters must be positive");
  }
  BandLayout layout;
  layout.fft_size = fft_size;
  layout.sample_rate_hz = sample_rate_hz;
  const int max_bin = fft_size / 2;
  const double bin_hz = static_cast<double>(sample_rate_hz) / fft_size;
  const double edge = std::pow(2.0, 1.0 / 6.0);

  for (int j = 0; j < num_bands; ++j) {
    Band band;
    band.center_hz = first_center_hz * std::pow(2.0, j / 3.0);
    band.lower_hz = band.center_hz / edge;
    band.upper_hz = band.center_hz * edge;
    band.k1 = -1;
    for (int k = 0; k <= max_bin; ++k) {
      const double f = k * bin_hz;
      if (f >= band.lower_hz && f < band.upper_hz) {
        if (band.k1 < 0) band.k1 = k;
        band.k2 = k + 1;
      }
    }
    if (band.k1 < 0) {
      throw InvalidArgument("one-third octave band " + std::to_string(j) + " (" +
                            std::to_string(band.center_hz) + " Hz) contains no STFT bin");
    }
    layout.bands.push_back(band);
  }
  return layout;
}

EnvelopeMatrix Envelopes(const Matrix& magnitude, const BandLayout& layout) {
  const Eigen::Index frames = magnitude.rows();
  EnvelopeMatrix env(layout.num_bands(), frames);
  for (int j = 0; j < layout.num_bands(); ++j) {
    const Band& b = layout.bands[static_cast<std::size_t>(j)];
    if (b.k2 > magnitude.cols()) throw InvalidArgument("band exceeds spectrogram bin range");
    for (Eigen::Index m = 0; m < frames; ++m) {
      double sum = 0.0;
      for (int k = b.k1; k < b.k2; ++k) sum += magnitude(m, k) * magnitude(m, k);
      env(j, m) = std::sqrt(sum);
    }
  }
  return env;
}

EnvelopeMatrix Envelopes(const Spectrogram& spec, const BandLayout& layout) {
  return Envelopes(spec.magnitude, layout);
}

EnvelopeVector FrameEnvelope(const EnvelopeMatrix& env, int band, int frame, int length) {
  if (band < 0 || band >= env.rows()) throw InvalidArgument("band index out of range");
  if (length <= 0) throw InvalidArgument("envelope length must be positive");
  if (frame < length - 1 || frame >= env.cols()) {
    throw InvalidArgument("frame " + std::to_string(frame) + " lacks " + std::to_string(length) +
                          " frames of context");
  }
  EnvelopeVector v;
  v.band = band;
  v.frame = frame;
  v.values.resize(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) v.values[static_cast<std::size_t>(i)] = env(band, frame - length + 1 + i);
  return v;
}

Matrix BandGainsToStftGains(const Matrix& band_gains, const BandLayout& layout, int num_bins,
                            OutOfBandPolicy policy) {
  if (band_gains.rows() != layout.num_bands()) {
    throw InvalidArgument("band gain rows do not match the band layout");
  }
  const double fill = policy == OutOfBandPolicy::kPassThrough ? 1.0 : 0.0;
  Matrix gains = Matrix::Constant(band_gains.cols(), num_bins, fill);
  for (int j = 0; j < layout.num_bands(); ++j) {
    const Band& b = layout.bands[static_cast<std::size_t>(j)];
    if (b.k2 > num_bins) throw InvalidArgument("band exceeds STFT bin range");
    for (Eigen::Index m = 0; m < band_gains.cols(); ++m) {
      for (int k = b.k1; k < b.k2; ++k) gains(m, k) = band_gains(j, m);
    }
  }
  return gains;
}

std::vector<double> AverageOverlappingGains(std::span<const GainVector> gains, int num_frames) {
  std::vector<double> sum(static_cast<std::size_t>(num_frames), 0.0);
  std::vector<int> count(static_cast<std::size_t>(num_frames), 0);
  for (const GainVector& g : gains) {
    const int n = static_cast<int>(g.values.size());
    for (int i = 0; i < n; ++i) {
      const int m = g.frame - n + 1 + i;
      if (m < 0 || m >= num_frames) continue;
      sum[static_cast<std::size_t>(m)] += g.values[static_cast<std::size_t>(i)];
      ++count[static_cast<std::size_t>(m)];
    }
  }
  for (int m = 0; m < num_frames; ++m) {
    if (count[static_cast<std::size_t>(m)] == 0) {
      throw InvalidArgument("frame " + std::to_string(m) + " is not covered by any gain vector");
    }
    sum[static_cast<std::size_t>(m)] /= count[static_cast<std::size_t>(m)];
  }
  return sum;
}

}  // namespace astoi
