// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Internal FFTW wrapper; not installed.

#ifndef ASTOI_SRC_FFT_HPP_
#define ASTOI_SRC_FFT_HPP_

#include <fftw3.h>

namespace astoi::internal {

/// In-place buffers plus forward (r2c) and inverse (c2r) plans of size n.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const noexcept { return n_; }
  double* time() noexcept { return time_; }
  fftw_complex* freq() noexcept { return freq_; }
  void Forward() { fftw_execute(forward_); }
  // Unnormalized: the result is n times the inverse DFT.
  void Inverse() { fftw_execute(inverse_); }

 private:
  int n_;
  double* time_;
  fftw_complex* freq_;
  fftw_plan forward_;
  fftw_plan inverse_;
};

/// Per-thread cached transform of size n.
RealFft& FftFor(int n);

}  // namespace astoi::internal

#endif  // ASTOI_SRC_FFT_HPP_
