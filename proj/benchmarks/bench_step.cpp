#include <benchmark/benchmark.h>

#include "ergo/montecarlo.hpp"

using namespace ergo;

static void BM_OverdampedStep(benchmark::State& state) {
    auto L = GeneratorSpec::overdamped(Potential::quadratic(1.0));
    auto e = mc::make_ensemble(L, static_cast<std::size_t>(state.range(0)), 1e-3, 1);
    for (auto _ : state) {
        mc::step(e, L, static_cast<int>(state.range(1)));
        benchmark::DoNotOptimize(e.pos.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OverdampedStep)->Args({10000, 1})->Args({100000, 1})->Args({100000, 4});

static void BM_KineticStep(benchmark::State& state) {
    auto L = GeneratorSpec::kinetic(Potential::quadratic(1.0));
    auto e = mc::make_ensemble(L, static_cast<std::size_t>(state.range(0)), 1e-3, 1);
    for (auto _ : state) {
        mc::step(e, L, 1);
        benchmark::DoNotOptimize(e.vel.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KineticStep)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
