// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_OCTAVE_HPP_
#define ASTOI_OCTAVE_HPP_

#include <span>
#include <vector>

#include "astoi/stft.hpp"
#include "astoi/types.hpp"

namespace astoi {

inline constexpr int kNumBands = 15;
inline constexpr int kEnvelopeLen = 30;  // 384 ms at a 12.8 ms hop
inline constexpr double kFirstCenterHz = 150.0;

/// One-third-octave band. STFT bins [k1, k2) belong to it.
struct Band {
  double center_hz = 0.0;
  double lower_hz = 0.0;
  double upper_hz = 0.0;
  int k1 = 0;
  int k2 = 0;

  int width() const noexcept { return k2 - k1; }
};

struct BandLayout {
  std::vector<Band> bands;
  int fft_size = 256;
  int sample_rate_hz = kWorkingRateHz;

  int num_bands() const noexcept { return static_cast<int>(bands.size()); }
  friend bool operator==(const BandLayout& a, const BandLayout& b) {
    if (a.fft_size != b.fft_size || a.sample_rate_hz != b.sample_rate_hz ||
        a.bands.size() != b.bands.size()) {
      return false;
    }
    for (std::size_t j = 0; j < a.bands.size(); ++j) {
      if (a.bands[j].k1 != b.bands[j].k1 || a.bands[j].k2 != b.bands[j].k2) return false;
    }
    return true;
  }
};

/// Band amplitudes, J rows by M frames.
using EnvelopeMatrix = Matrix;

/// N consecutive band amplitudes ending at `frame`.
struct EnvelopeVector {
  std::vector<double> values;
  int band = 0;
  int frame = 0;  // last frame covered
};

/// Per-frame gains for one envelope window, values in [0, 1].
struct GainVector {
  std::vector<double> values;
  int band = 0;
  int frame = 0;  // last frame covered
};

enum class OutOfBandPolicy { kZero, kPassThrough };

/// Centers at first_center_hz * 2^(j/3); edges at center * 2^(+-1/6). Bin k
/// with frequency k*fs/K joins band j iff lower(j) <= f < upper(j). Throws
/// InvalidArgument if any band ends up empty.
BandLayout BuildBandLayout(int fft_size = 256, int sample_rate_hz = kWorkingRateHz,
                           int num_bands = kNumBands, double first_center_hz = kFirstCenterHz);

/// Root-sum-square of the magnitudes in each band, per frame.
EnvelopeMatrix Envelopes(const Spectrogram& spec, const BandLayout& layout);
EnvelopeMatrix Envelopes(const Matrix& magnitude, const BandLayout& layout);

EnvelopeVector FrameEnvelope(const EnvelopeMatrix& env, int band, int frame, int length = kEnvelopeLen);

/// Expands J x M band gains to an M x bins STFT gain matrix: every bin of
/// band j gets band_gains(j, m). Bins outside all bands get 0 or 1
/// depending on `policy`.
Matrix BandGainsToStftGains(const Matrix& band_gains, const BandLayout& layout, int num_bins,
                            OutOfBandPolicy policy = OutOfBandPolicy::kZero);

/// Mean of all gain-vector entries that land on each frame. Every frame in
/// [0, num_frames) must be covered at least once.
std::vector<double> AverageOverlappingGains(std::span<const GainVector> gains, int num_frames);

}  // namespace astoi

#endif  // ASTOI_OCTAVE_HPP_
