#include <benchmark/benchmark.h>

#include <random>

#include "porovox/degrade.hpp"
#include "porovox/filters.hpp"
#include "porovox/labeler.hpp"
#include "porovox/patchflow.hpp"
#include "porovox/phantom.hpp"

using namespace porovox;

namespace {

Volume bench_phantom(int n) {
    PhantomSpec spec;
    spec.dims = {n, n, n};
    spec.blur_sigma = 0.8;
    spec.noise_sigma = 2.0;
    spec.seed = 1;
    spec.pores = random_pores(spec, 8, 2.5, 5.0, 2);
    return generate_phantom(spec).first;
}

void bm_gaussian_blur(benchmark::State& state) {
    const Volume v = bench_phantom(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur3d(v, 1.5));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(v.size()));
}
BENCHMARK(bm_gaussian_blur)->Arg(64)->Arg(128);

void bm_gradient(benchmark::State& state) {
    const Volume v = bench_phantom(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gradient_l1(v));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(v.size()));
}
BENCHMARK(bm_gradient)->Arg(64)->Arg(128);

void bm_extract_labels(benchmark::State& state) {
    const Volume v = bench_phantom(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(extract_pore_labels(v, 2));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(v.size()));
}
BENCHMARK(bm_extract_labels)->Arg(64)->Arg(128);

void bm_patch_roundtrip(benchmark::State& state) {
    const Volume v = bench_phantom(static_cast<int>(state.range(0)));
    const auto grid = plan_patches(v.dims, 32, 16);
    for (auto _ : state) {
        PatchAggregator agg(grid);
        for (std::size_t i = 0; i < grid.patch_count(); ++i)
            agg.add(i, extract_patch(v, grid, i));
        benchmark::DoNotOptimize(agg.finalize());
    }
}
BENCHMARK(bm_patch_roundtrip)->Arg(64)->Arg(96);

void bm_radon_fbp_slice(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<float> slice(static_cast<std::size_t>(n) * n);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> u(0.0f, 0.02f);
    for (float& x : slice) x = u(rng);
    const auto angles = subsampled_angles(360, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(fbp2d(radon2d(slice, n, angles), n));
}
BENCHMARK(bm_radon_fbp_slice)->Arg(64)->Arg(128);

} // namespace

BENCHMARK_MAIN();
