#include <benchmark/benchmark.h>

#include "zrplab/engine.hpp"

namespace {

using namespace zrplab;

ScenarioSpec spec_for(ScenarioKind kind, double horizon) {
  ScenarioSpec spec;
  spec.kind = kind;
  spec.horizon = horizon;
  spec.checkpoints = {horizon};
  spec.observers = {0.0, 0.25};
  return spec;
}

void run_scenario(benchmark::State& state, ScenarioKind kind) {
  const auto spec = spec_for(kind, static_cast<double>(state.range(0)));
  std::uint64_t replica = 0;
  std::uint64_t events = 0;
  for (auto _ : state) {
    auto e = init_scenario(spec, replica++);
    auto log = run(e, spec);
    events += log.events;
    benchmark::DoNotOptimize(log);
  }
  state.counters["events/s"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}

void BM_Stationary(benchmark::State& state) { run_scenario(state, Stationary{1.0}); }
void BM_MuHatPair(benchmark::State& state) { run_scenario(state, MuHatPair{1.0}); }
void BM_ThreeProcess(benchmark::State& state) { run_scenario(state, ThreeProcess{1.0, 0.5}); }
void BM_Segment(benchmark::State& state) { run_scenario(state, Segment{1.0, 0.8, 5}); }

BENCHMARK(BM_Stationary)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MuHatPair)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThreeProcess)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Segment)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PerSiteClocks(benchmark::State& state) {
  auto spec = spec_for(MuHatPair{1.0}, static_cast<double>(state.range(0)));
  spec.clock = ClockMode::per_site;
  std::uint64_t replica = 0;
  for (auto _ : state) {
    auto e = init_scenario(spec, replica++);
    benchmark::DoNotOptimize(run(e, spec));
  }
}
BENCHMARK(BM_PerSiteClocks)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
