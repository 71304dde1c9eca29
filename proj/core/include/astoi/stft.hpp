// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_STFT_HPP_
#define ASTOI_STFT_HPP_

#include <cstddef>
#include <vector>

#include "astoi/signal.hpp"
#include "astoi/types.hpp"

namespace astoi {

/// Hann-windowed STFT geometry. The defaults give 25.6 ms frames with a
/// 12.8 ms shift at 10 kHz. hop must equal window_len / 2.
struct StftConfig {
  int fft_size = 256;
  int window_len = 256;
  int hop = 128;

  int num_bins() const noexcept { return fft_size / 2 + 1; }
  void Validate() const;

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

/// Single-sided magnitude and phase, one row per frame.
struct Spectrogram {
  StftConfig config;
  int sample_rate_hz = kWorkingRateHz;
  std::size_t signal_length = 0;  // samples in the analysed signal
  Matrix magnitude;               // frames x bins, >= 0
  Matrix phase;                   // frames x bins, radians

  Eigen::Index num_frames() const noexcept { return magnitude.rows(); }
  Eigen::Index num_bins() const noexcept { return magnitude.cols(); }
};

/// Periodic (DFT-even) Hann window: 0.5 - 0.5 cos(2 pi n / len).
std::vector<double> HannWindow(int len);

/// Frames produced for a signal of `length` samples: frame m starts at
/// m * hop; a trailing partial frame is zero-padded.
std::size_t NumFrames(std::size_t length, const StftConfig& config);

Spectrogram Analyze(const TimeSignal& signal, const StftConfig& config = {});

/// Weighted overlap-add with the noisy (stored) phase. The overlap-added
/// Hann-weighted frames are divided sample-wise by the summed squared
/// window, so Synthesize(Analyze(s)) reproduces s wherever that sum is
/// non-zero. The output has spec.signal_length samples.
TimeSignal Synthesize(const Spectrogram& spec);

/// Elementwise magnitude scaling; phase is carried over untouched.
Spectrogram ApplyGain(const Spectrogram& spec, const Matrix& gains);

}  // namespace astoi

#endif  // ASTOI_STFT_HPP_
