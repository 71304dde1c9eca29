// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "fft.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace astoi::internal {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  time_ = fftw_alloc_real(static_cast<std::size_t>(n));
  freq_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
  std::lock_guard<std::mutex> lock(PlannerMutex());
  forward_ = fftw_plan_dft_r2c_1d(n, time_, freq_, FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r_1d(n, freq_, time_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(inverse_);
  fftw_free(time_);
  fftw_free(freq_);
}

RealFft& FftFor(int n) {
  thread_local std::map<int, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft>(n);
  return *slot;
}

}  // namespace astoi::internal
