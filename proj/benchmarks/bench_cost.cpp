// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "astoi/cost.hpp"

namespace astoi {
namespace {

std::vector<double> Uniform(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = d(rng);
  return v;
}

void BM_Elc(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto x = Uniform(rng, 30), y = Uniform(rng, 30);
  for (auto _ : state) benchmark::DoNotOptimize(Elc(x, y));
}
BENCHMARK(BM_Elc);

void BM_ElcGrad(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto x = Uniform(rng, 30), y = Uniform(rng, 30);
  for (auto _ : state) benchmark::DoNotOptimize(ElcGrad(x, y));
}
BENCHMARK(BM_ElcGrad);

void BM_EmseGrad(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto x = Uniform(rng, 30), y = Uniform(rng, 30);
  for (auto _ : state) benchmark::DoNotOptimize(EmseGrad(x, y));
}
BENCHMARK(BM_EmseGrad);

}  // namespace
}  // namespace astoi

BENCHMARK_MAIN();
