#include <benchmark/benchmark.h>

#include <cmath>

#include "ergo/evolve.hpp"

using namespace ergo;

static void BM_SemigroupEvolve(benchmark::State& state) {
    auto F = Potential::quadratic(1.0);
    DiscretizedGenerator d(F, 8.0, static_cast<int>(state.range(0)));
    std::vector<double> f0(static_cast<std::size_t>(d.size()));
    for (int i = 0; i < d.size(); ++i) f0[static_cast<std::size_t>(i)] = d.node(i);
    EvolveOptions opts;
    opts.density_mode = false;
    opts.dt = 0.002;
    std::vector<double> tg{0.0, 1.0};
    for (auto _ : state) {
        auto tr = semigroup_evolve(d, f0, tg, opts);
        benchmark::DoNotOptimize(tr.variance.back());
    }
}
BENCHMARK(BM_SemigroupEvolve)->Arg(801)->Arg(1601);

static void BM_KineticEvolveStep(benchmark::State& state) {
    auto F = Potential::quadratic(1.0);
    int n = static_cast<int>(state.range(0));
    KineticGrid kg{Grid1D{-6, 6, n}, Grid1D{-6, 6, n}};
    KineticDiscretization kd(F, kg, true);
    std::vector<double> h0(static_cast<std::size_t>(kd.size()));
    double mass = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x = kg.x.node(i), v = kg.v.node(j);
            std::size_t id = static_cast<std::size_t>(kg.index(i, j));
            h0[id] = std::exp(-((x - 1.0) * (x - 1.0) + v * v)) /
                     std::exp(-(v * v + 2.0 * F.value1(x)));
            mass += h0[id] * kd.weights()[id];
        }
    for (auto& h : h0) h /= mass;
    std::vector<double> tg{0.0, 0.5};
    for (auto _ : state) {
        auto tr = kinetic_evolve(kd, h0, tg, 0.01);
        benchmark::DoNotOptimize(tr.entropy.back());
    }
}
BENCHMARK(BM_KineticEvolveStep)->Arg(81)->Arg(161);
