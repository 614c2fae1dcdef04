// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels on latent-sized features.
//   ./bench_kernels --benchmark_filter=dct2d

#include <benchmark/benchmark.h>

#include "fbs/band_masks.hpp"
#include "fbs/dct.hpp"
#include "fbs/rng.hpp"
#include "fbs/substitution.hpp"

namespace {

fbs::Exec exec_of(const benchmark::State& state) {
    return state.range(1) == 0 ? fbs::Exec::serial : fbs::Exec::parallel;
}

fbs::Shape shape_of(const benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    return {4, n, n};
}

void label(benchmark::State& state) {
    state.SetLabel(state.range(1) == 0 ? "serial" : "omp");
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(shape_of(state).numel()));
}

void BM_dct2d(benchmark::State& state) {
    const auto z = fbs::standard_normal(shape_of(state), 1);
    const auto exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(fbs::dct2d(z, exec));
    label(state);
}

void BM_idct2d(benchmark::State& state) {
    const auto s = fbs::standard_normal(shape_of(state), 2);
    const auto exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(fbs::idct2d(s, exec));
    label(state);
}

void BM_fbs2d(benchmark::State& state) {
    const auto shape = shape_of(state);
    const auto g = fbs::standard_normal(shape, 3);
    const auto x = fbs::standard_normal(shape, 4);
    const auto mask = fbs::make_mask_2d(fbs::BandSpec::coordinate_defaults(fbs::BandMode::low),
                                        shape.height, shape.width);
    const auto exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(fbs::fbs2d(g, x, mask, exec));
    label(state);
}

void BM_adafbs(benchmark::State& state) {
    const auto shape = shape_of(state);
    const auto g = fbs::standard_normal(shape, 5);
    const auto x = fbs::standard_normal(shape, 6);
    const auto masks = fbs::make_mask_pair_1d(fbs::BandSpec::percentile_defaults(fbs::BandMode::low),
                                              shape.height, shape.width);
    const auto exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(fbs::adafbs(g, x, masks, exec));
    label(state);
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int n : {64, 128})
        for (int e : {0, 1}) b->Args({n, e});
    b->ArgNames({"hw", "omp"})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_dct2d)->Apply(sizes);
BENCHMARK(BM_idct2d)->Apply(sizes);
BENCHMARK(BM_fbs2d)->Apply(sizes);
BENCHMARK(BM_adafbs)->Apply(sizes);

BENCHMARK_MAIN();
