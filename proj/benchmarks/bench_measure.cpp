#include <benchmark/benchmark.h>

#include "henon/measure.hpp"
#include "henon/precise.hpp"

namespace {

const henon::HenonMap kHorseshoe = henon::HenonMap::quadratic(-6.0, 0.3);

void BM_Discrepancy(benchmark::State& state) {
  const auto nu8 = henon::empirical_measure(henon::enumerate_fix(kHorseshoe, 8), henon::PointSet::fix);
  const auto nu10 = henon::empirical_measure(henon::enumerate_fix(kHorseshoe, 10), henon::PointSet::fix);
  const double side = henon::cell_side_for(nu10.half_width);
  for (auto _ : state) benchmark::DoNotOptimize(henon::discrepancy(nu8, nu10, side));
}
BENCHMARK(BM_Discrepancy);

void BM_OrbitGreenValues(benchmark::State& state) {
  const auto spectrum = henon::enumerate_fix(kHorseshoe, 6);
  for (auto _ : state) {
    for (const auto& o : spectrum.orbits) benchmark::DoNotOptimize(henon::orbit_green_values(kHorseshoe, o));
  }
}
BENCHMARK(BM_OrbitGreenValues)->Unit(benchmark::kMillisecond);

}  // namespace
