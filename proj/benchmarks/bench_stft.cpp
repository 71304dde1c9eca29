// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include <random>

#include "astoi/octave.hpp"
#include "astoi/stft.hpp"

namespace astoi {
namespace {

TimeSignal Noise(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  TimeSignal t{std::vector<double>(n), kWorkingRateHz};
  for (double& x : t.samples) x = d(rng);
  return t;
}

void BM_Analyze(benchmark::State& state) {
  const TimeSignal x = Noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Analyze(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Analyze)->Arg(10000)->Arg(100000);

void BM_Synthesize(benchmark::State& state) {
  const Spectrogram spec = Analyze(Noise(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(Synthesize(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Synthesize)->Arg(10000)->Arg(100000);

void BM_Envelopes(benchmark::State& state) {
  const Spectrogram spec = Analyze(Noise(100000));
  const BandLayout layout = BuildBandLayout();
  for (auto _ : state) benchmark::DoNotOptimize(Envelopes(spec, layout));
}
BENCHMARK(BM_Envelopes);

}  // namespace
}  // namespace astoi

BENCHMARK_MAIN();
