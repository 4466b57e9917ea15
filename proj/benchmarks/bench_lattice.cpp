#include <benchmark/benchmark.h>

#include "curvemoments/arithmetic.hpp"
#include "curvemoments/surfaces.hpp"

using namespace curvemoments;

static void BM_SphereEnumeration(benchmark::State& state) {
    const auto E = static_cast<std::int64_t>(state.range(0));
    for (auto _ : state) {
        auto fs = enumerate_sphere_lattice(3, E);
        benchmark::DoNotOptimize(fs.size());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SphereEnumeration)->RangeMultiplier(4)->Range(1 << 8, 1 << 20)->Complexity();

static void BM_SphereEnumeration4d(benchmark::State& state) {
    const auto E = static_cast<std::int64_t>(state.range(0));
    for (auto _ : state) {
        auto fs = enumerate_sphere_lattice(4, E);
        benchmark::DoNotOptimize(fs.size());
    }
}
BENCHMARK(BM_SphereEnumeration4d)->Arg(500)->Arg(2000);

static void BM_QuadricEnumeration(benchmark::State& state) {
    SymMatrixI q(2);
    q.at(0, 0) = 1;
    q.at(1, 1) = 2;
    const auto E = static_cast<std::int64_t>(state.range(0));
    for (auto _ : state) {
        auto fs = enumerate_quadric_lattice(q, E);
        benchmark::DoNotOptimize(fs.size());
    }
}
BENCHMARK(BM_QuadricEnumeration)->Arg(10000)->Arg(100000);

static void BM_AdditivePairs(benchmark::State& state) {
    const auto fs = enumerate_sphere_lattice(3, state.range(0));
    for (auto _ : state) {
        auto rep = additive_pairs_K(fs);
        benchmark::DoNotOptimize(rep.K_nonzero);
    }
}
BENCHMARK(BM_AdditivePairs)->Arg(101)->Arg(500);
