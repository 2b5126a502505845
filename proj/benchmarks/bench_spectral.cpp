#include <benchmark/benchmark.h>

#include "ergo/local_poincare.hpp"
#include "ergo/spectral.hpp"

using namespace ergo;

static void BM_SpectralGap(benchmark::State& state) {
    auto F = Potential::quadratic(1.0);
    for (auto _ : state) {
        DiscretizedGenerator d(F, 8.0, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(lambda1_of(d));
    }
}
BENCHMARK(BM_SpectralGap)->Arg(401)->Arg(1601)->Arg(4001);

static void BM_LocalPoincare(benchmark::State& state) {
    GibbsMeasure m(Potential::quadratic(1.0), 8.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto lp = local_poincare(m, 3.0);
        benchmark::DoNotOptimize(lp.numerical);
    }
}
BENCHMARK(BM_LocalPoincare)->Arg(401)->Arg(1201);
