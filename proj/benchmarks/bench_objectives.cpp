// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include <memory>
#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "dsgd/dataset.hpp"
#include "dsgd/objectives.hpp"

namespace {

using namespace dsgd;

// Minibatch gradient of the 784-100-10 network on MNIST-shaped data.
void BM_MlpBatchGradient(benchmark::State& state) {
  auto data = std::make_shared<const Dataset>(synthetic_gaussian_blobs(10, 100, 784, 1, 1.0));
  const MlpObjective f(MlpSpec{{784, 100, 10}}, data);
  const auto w = f.initial_weights(1);
  std::vector<std::size_t> batch(static_cast<std::size_t>(state.range(0)));
  std::iota(batch.begin(), batch.end(), std::size_t{0});
  std::vector<double> grad(f.dim());
  for (auto _ : state) benchmark::DoNotOptimize(f.batch_value_and_gradient(w, batch, grad));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpBatchGradient)->Arg(64)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_QuadraticGradient(benchmark::State& state) {
  const auto f = QuadraticObjective::isotropic(static_cast<std::size_t>(state.range(0)));
  std::vector<double> w(f.dim(), 1.0), grad(f.dim());
  for (auto _ : state) benchmark::DoNotOptimize(f.value_and_gradient(w, grad));
}
BENCHMARK(BM_QuadraticGradient)->Arg(10)->Arg(1000);

}  // namespace
