// Copyright 2026 The dsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include <benchmark/benchmark.h>

#include "dsgd/binomial.hpp"
#include "dsgd/rng.hpp"
#include "dsgd/sampler.hpp"

namespace {

using namespace dsgd;

// Arguments: n, p in thousandths. np < 30 takes the inversion path.
void BM_Binomial(benchmark::State& state) {
  const auto n = static_cast<Count>(state.range(0));
  const double p = static_cast<double>(state.range(1)) / 1000.0;
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(binomial(n, p, rng));
}
BENCHMARK(BM_Binomial)->Args({20, 500})->Args({1000, 10})->Args({1000, 500})->Args({1'000'000, 300});

GradientVector random_gradient(std::size_t d) {
  Rng rng(2);
  std::vector<double> g(d);
  for (auto& x : g) x = rng.normal();
  return GradientVector(std::move(g));
}

// One ZIM update for the 79400-parameter network; argument is n.
void BM_ZimUpdate79400(benchmark::State& state) {
  const auto grad = random_gradient(79400);
  const ZimConfig cfg(static_cast<Count>(state.range(0)), 0.5, 1e-4, 1.0 / 256);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(zim_update(grad, cfg, rng));
}
BENCHMARK(BM_ZimUpdate79400)->Arg(1)->Arg(4096)->Arg(1 << 20)->Unit(benchmark::kMicrosecond);

void BM_SampleZimSmall(benchmark::State& state) {
  const ZimConfig cfg(static_cast<Count>(state.range(0)), 0.5, 0.01);
  const auto p = augment_with_zero_inflation(build_probabilities(random_gradient(10), cfg.c()), cfg.r());
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(sample_zim(cfg.n(), p, rng));
}
BENCHMARK(BM_SampleZimSmall)->Arg(1)->Arg(5)->Arg(20);

}  // namespace
