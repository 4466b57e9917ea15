#include <benchmark/benchmark.h>

#include "curvemoments/expsum.hpp"
#include "curvemoments/moments.hpp"
#include "curvemoments/strichartz.hpp"

using namespace curvemoments;

static void BM_EvaluatePeriodic(benchmark::State& state) {
    const auto fs = enumerate_sphere_lattice(2, state.range(0));
    const auto coeffs = make_coefficients(fs, ModelSpec{CoefficientModel::RandomPhase, 1});
    const TorusGrid grid = auto_grid(fs, 4.0);
    for (auto _ : state) {
        auto samples = evaluate_periodic(fs, coeffs, grid);
        benchmark::DoNotOptimize(samples.values.data());
    }
}
BENCHMARK(BM_EvaluatePeriodic)->Arg(25)->Arg(400)->Arg(1600);

static void BM_SchrodingerField(benchmark::State& state) {
    const auto fs = paraboloid_points(1, state.range(0));
    const auto coeffs = make_coefficients(fs, ModelSpec{});
    const TorusGrid grid = auto_grid(fs, 8.0);
    std::vector<int> x_dims(grid.dims.begin(), grid.dims.end() - 1);
    for (auto _ : state) {
        auto samples = schrodinger_samples(fs, coeffs, x_dims, grid.dims.back());
        benchmark::DoNotOptimize(samples.values.data());
    }
}
BENCHMARK(BM_SchrodingerField)->Arg(8)->Arg(16)->Arg(32);

static void BM_L4Exact(benchmark::State& state) {
    const auto fs = enumerate_sphere_lattice(2, state.range(0));
    const auto coeffs = make_coefficients(fs, ModelSpec{CoefficientModel::Gaussian, 2});
    for (auto _ : state) {
        benchmark::DoNotOptimize(l4_exact(fs, coeffs));
    }
}
BENCHMARK(BM_L4Exact)->Arg(25)->Arg(1105);

static void BM_DecouplingDefect(benchmark::State& state) {
    const auto fs = enumerate_sphere_lattice(2, state.range(0));
    const auto coeffs = make_coefficients(fs, ModelSpec{});
    const CapPartition part(fs.surface(), 8.0);
    for (auto _ : state) {
        auto rep = decoupling_defect(fs, coeffs, part, 4.0);
        benchmark::DoNotOptimize(rep.defect);
    }
}
BENCHMARK(BM_DecouplingDefect)->Arg(25)->Arg(400);
