// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels against their OpenMP forms.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "panoact/geometry.hpp"
#include "panoact/kernels.hpp"

namespace {

using namespace panoact;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

BoxTrack random_track(std::size_t n, std::size_t t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.0, 0.9), size(0.01, 0.1);
    BoxTrack track(n, t);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < t; ++f) {
            const double x = pos(rng), y = pos(rng);
            track.at(i, f) = Box{x, y, x + size(rng), y + size(rng)};
        }
    }
    return track;
}

template <void (*Kernel)(const double*, const double*, double*, const kernels::GemmArgs&)>
void BM_Gemm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_values(n * n, 1), b = random_values(n * n, 2);
    std::vector<double> c(n * n);
    kernels::GemmArgs args{n, n, n, false, false, false};
    for (auto _ : state) {
        Kernel(a.data(), b.data(), c.data(), args);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK_TEMPLATE(BM_Gemm, kernels::gemm_serial)->Arg(64)->Arg(256);
BENCHMARK_TEMPLATE(BM_Gemm, kernels::gemm_omp)->Arg(64)->Arg(256);

template <void (*Kernel)(const double*, double*, std::size_t, std::size_t, std::size_t)>
void BM_Softmax(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const std::size_t n = 128;
    const auto x = random_values(rows * n, 3);
    std::vector<double> y(x.size());
    for (auto _ : state) {
        Kernel(x.data(), y.data(), rows, n, 1);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK_TEMPLATE(BM_Softmax, kernels::softmax_serial)->Arg(256)->Arg(4096);
BENCHMARK_TEMPLATE(BM_Softmax, kernels::softmax_omp)->Arg(256)->Arg(4096);

template <void (*Kernel)(const double*, const double*, double*, const kernels::RoiAlignArgs&)>
void BM_RoiAlign(benchmark::State& state) {
    kernels::RoiAlignArgs args;
    args.frames = 3;
    args.channels = 32;
    args.height = 12;
    args.width = 128;
    args.individuals = static_cast<std::size_t>(state.range(0));
    args.out_h = args.out_w = 4;
    const auto grid = random_values(args.frames * args.channels * args.height * args.width, 4);
    const auto boxes = random_track(args.individuals, args.frames, 5).flat();
    std::vector<double> out(args.individuals * args.frames * args.channels * args.out_h * args.out_w);
    for (auto _ : state) {
        Kernel(grid.data(), boxes.data(), out.data(), args);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK_TEMPLATE(BM_RoiAlign, kernels::roi_align_serial)->Arg(8)->Arg(64);
BENCHMARK_TEMPLATE(BM_RoiAlign, kernels::roi_align_omp)->Arg(8)->Arg(64);

template <ProximityMatrix (*Kernel)(const BoxTrack&, ProximityMetric)>
void BM_Proximity(benchmark::State& state) {
    const auto track = random_track(static_cast<std::size_t>(state.range(0)), 3, 6);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(track, ProximityMetric::Tgiou));
}
BENCHMARK_TEMPLATE(BM_Proximity, proximity_matrix_serial)->Arg(16)->Arg(256);
BENCHMARK_TEMPLATE(BM_Proximity, proximity_matrix_omp)->Arg(16)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
