// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ASTOI_SIGNAL_HPP_
#define ASTOI_SIGNAL_HPP_

#include <cstddef>
#include <vector>

namespace astoi {

inline constexpr int kWorkingRateHz = 10000;

/// Mono waveform. Amplitudes are nominally in [-1, 1].
struct TimeSignal {
  std::vector<double> samples;
  int sample_rate_hz = kWorkingRateHz;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }

  friend bool operator==(const TimeSignal&, const TimeSignal&) = default;
};

}  // namespace astoi

#endif  // ASTOI_SIGNAL_HPP_
