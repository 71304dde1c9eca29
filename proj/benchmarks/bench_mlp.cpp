// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <benchmark/benchmark.h>

#include "astoi/neural.hpp"

namespace astoi {
namespace {

// Default per-band network: 450 inputs, three 512-unit layers, 30 gains.
void BM_ForwardBackward(benchmark::State& state) {
  const MlpModel model = InitModel(ModelShape{}, 5);
  const Eigen::Index batch = state.range(0);
  const Matrix input = Matrix::Random(450, batch);
  const Matrix grad = Matrix::Random(30, batch);
  for (auto _ : state) {
    ForwardCache cache;
    benchmark::DoNotOptimize(Forward(model, input, Mode::kTrain, &cache));
    benchmark::DoNotOptimize(Backward(model, cache, grad));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(256);

void BM_Infer(benchmark::State& state) {
  const MlpModel model = InitModel(ModelShape{}, 6);
  const Matrix input = Matrix::Random(450, 256);
  for (auto _ : state) benchmark::DoNotOptimize(Forward(model, input, Mode::kInfer));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_Infer);

}  // namespace
}  // namespace astoi

BENCHMARK_MAIN();
