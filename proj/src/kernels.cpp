// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>

namespace panoact::kernels {

namespace {
std::atomic<bool> g_parallel{false};

inline void gemm_row(const double* a, const double* b, double* c, const GemmArgs& g, std::size_t i) {
    double* crow = c + i * g.n;
    if (!g.accumulate) std::fill(crow, crow + g.n, 0.0);
    for (std::size_t p = 0; p < g.k; ++p) {
        const double aip = g.trans_a ? a[p * g.m + i] : a[i * g.k + p];
        if (g.trans_b) {
            for (std::size_t j = 0; j < g.n; ++j) crow[j] += aip * b[j * g.k + p];
        } else {
            const double* brow = b + p * g.n;
            for (std::size_t j = 0; j < g.n; ++j) crow[j] += aip * brow[j];
        }
    }
}

inline void softmax_slice(const double* x, double* y, std::size_t n, std::size_t inner, std::size_t o,
                          std::size_t in) {
    const double* xs = x + o * n * inner + in;
    double* ys = y + o * n * inner + in;
    double mx = xs[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, xs[j * inner]);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        ys[j * inner] = std::exp(xs[j * inner] - mx);
        total += ys[j * inner];
    }
    for (std::size_t j = 0; j < n; ++j) ys[j * inner] /= total;
}

inline double bilinear(const double* plane, std::size_t h, std::size_t w, double v, double u) {
    v = std::clamp(v, 0.0, static_cast<double>(h - 1));
    u = std::clamp(u, 0.0, static_cast<double>(w - 1));
    const auto y0 = static_cast<std::size_t>(std::floor(v));
    const auto x0 = static_cast<std::size_t>(std::floor(u));
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const std::size_t x1 = std::min(x0 + 1, w - 1);
    const double ly = v - static_cast<double>(y0);
    const double lx = u - static_cast<double>(x0);
    // Difference form keeps a constant neighbourhood exact.
    const double a = plane[y0 * w + x0], b = plane[y0 * w + x1];
    const double c = plane[y1 * w + x0], e = plane[y1 * w + x1];
    const double top = a + lx * (b - a);
    const double bottom = c + lx * (e - c);
    return top + ly * (bottom - top);
}

// One (individual, frame) pair: all channels and bins.
inline void roi_align_cell(const double* grid, const double* boxes, double* out, const RoiAlignArgs& a,
                           std::size_t idx) {
    const std::size_t t = a.shared_grid ? 0 : idx % a.frames;
    const double* box = boxes + idx * 4;
    const double bin_w = (box[2] - box[0]) / static_cast<double>(a.out_w);
    const double bin_h = (box[3] - box[1]) / static_cast<double>(a.out_h);
    const std::size_t plane = a.height * a.width;
    double* dst = out + idx * a.channels * a.out_h * a.out_w;
    for (std::size_t c = 0; c < a.channels; ++c) {
        const double* src = grid + (t * a.channels + c) * plane;
        for (std::size_t r = 0; r < a.out_h; ++r) {
            const double y = box[1] + (static_cast<double>(r) + 0.5) * bin_h;
            const double v = y * static_cast<double>(a.height) - 0.5;
            for (std::size_t q = 0; q < a.out_w; ++q) {
                const double x = box[0] + (static_cast<double>(q) + 0.5) * bin_w;
                const double u = x * static_cast<double>(a.width) - 0.5;
                *dst++ = bilinear(src, a.height, a.width, v, u);
            }
        }
    }
}
}  // namespace

void set_parallel(bool enabled) { g_parallel.store(enabled); }
bool parallel() { return g_parallel.load(); }

void gemm_serial(const double* a, const double* b, double* c, const GemmArgs& args) {
    for (std::size_t i = 0; i < args.m; ++i) gemm_row(a, b, c, args, i);
}

void gemm_omp(const double* a, const double* b, double* c, const GemmArgs& args) {
    const auto m = static_cast<std::int64_t>(args.m);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) gemm_row(a, b, c, args, static_cast<std::size_t>(i));
}

void gemm(const double* a, const double* b, double* c, const GemmArgs& args) {
    // Small products are not worth a parallel region.
    if (parallel() && args.m * args.n * args.k >= 32768) {
        gemm_omp(a, b, c, args);
    } else {
        gemm_serial(a, b, c, args);
    }
}

void softmax_serial(const double* x, double* y, std::size_t outer, std::size_t n, std::size_t inner) {
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) softmax_slice(x, y, n, inner, o, in);
    }
}

void softmax_omp(const double* x, double* y, std::size_t outer, std::size_t n, std::size_t inner) {
    const auto total = static_cast<std::int64_t>(outer * inner);
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < total; ++s) {
        const auto idx = static_cast<std::size_t>(s);
        softmax_slice(x, y, n, inner, idx / inner, idx % inner);
    }
}

void softmax(const double* x, double* y, std::size_t outer, std::size_t n, std::size_t inner) {
    if (parallel() && outer * n * inner >= 16384) {
        softmax_omp(x, y, outer, n, inner);
    } else {
        softmax_serial(x, y, outer, n, inner);
    }
}

void roi_align_serial(const double* grid, const double* boxes, double* out, const RoiAlignArgs& args) {
    const std::size_t cells = args.individuals * args.frames;
    for (std::size_t idx = 0; idx < cells; ++idx) roi_align_cell(grid, boxes, out, args, idx);
}

void roi_align_omp(const double* grid, const double* boxes, double* out, const RoiAlignArgs& args) {
    const auto cells = static_cast<std::int64_t>(args.individuals * args.frames);
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < cells; ++idx) {
        roi_align_cell(grid, boxes, out, args, static_cast<std::size_t>(idx));
    }
}

void roi_align(const double* grid, const double* boxes, double* out, const RoiAlignArgs& args) {
    if (parallel()) {
        roi_align_omp(grid, boxes, out, args);
    } else {
        roi_align_serial(grid, boxes, out, args);
    }
}

}  // namespace panoact::kernels
