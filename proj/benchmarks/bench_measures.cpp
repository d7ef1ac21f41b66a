#include <benchmark/benchmark.h>

#include "zrplab/measures.hpp"
#include "zrplab/rng.hpp"

namespace {

using namespace zrplab;

void BM_GeometricQuantile(benchmark::State& state) {
  const auto law = Law::geometric(Density(1.0));
  SplitMix64 gen(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_via_quantile(law, gen.uniform()));
  }
}
BENCHMARK(BM_GeometricQuantile);

void BM_MuHatQuantile(benchmark::State& state) {
  const auto law = Law::mu_hat(Density(1.0));
  SplitMix64 gen(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_via_quantile(law, gen.uniform()));
  }
}
BENCHMARK(BM_MuHatQuantile);

void BM_CoupleMonotone(benchmark::State& state) {
  const auto lo = Law::geometric(Density(0.5));
  const auto hi = Law::geometric(Density(1.0));
  SplitMix64 gen(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(couple_monotone(lo, hi, gen.uniform()));
  }
}
BENCHMARK(BM_CoupleMonotone);

void BM_SiteUniform(benchmark::State& state) {
  std::int64_t site = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(site_uniform(7, 3, site++));
  }
}
BENCHMARK(BM_SiteUniform);

}  // namespace
