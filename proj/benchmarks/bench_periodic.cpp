#include <benchmark/benchmark.h>

#include "henon/lyapunov.hpp"
#include "henon/periodic.hpp"

namespace {

const henon::HenonMap kHorseshoe = henon::HenonMap::quadratic(-6.0, 0.3);

void BM_NewtonRefine(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto spectrum = henon::enumerate_fix(kHorseshoe, n);
  // Start from a perturbed orbit of exact period n.
  henon::CyclicOrbitVector seed;
  for (const auto& o : spectrum.orbits) {
    if (o.period == n) {
      seed = o.xs;
      break;
    }
  }
  for (auto& x : seed.xs) x += henon::Complex(1e-3, -1e-3);
  for (auto _ : state) {
    auto r = henon::newton_refine(kHorseshoe, seed);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_NewtonRefine)->Arg(4)->Arg(8)->Arg(16);

void BM_EnumerateFix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto s = henon::enumerate_fix(kHorseshoe, n);
    benchmark::DoNotOptimize(s);
  }
  state.counters["points"] = static_cast<double>(1 << n);
}
BENCHMARK(BM_EnumerateFix)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto spectrum = henon::enumerate_fix(kHorseshoe, 10);
  for (auto _ : state) {
    for (const auto& o : spectrum.orbits) benchmark::DoNotOptimize(henon::classify(kHorseshoe, o.xs));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(spectrum.orbits.size()));
}
BENCHMARK(BM_Classify);

void BM_LambdaEstimate(benchmark::State& state) {
  const auto spectrum = henon::enumerate_fix(kHorseshoe, 10);
  for (auto _ : state) benchmark::DoNotOptimize(henon::lambda_estimate(spectrum, henon::PointSet::sper));
}
BENCHMARK(BM_LambdaEstimate);

}  // namespace
