// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Hot loops, each in a serial reference form and an OpenMP form. The OpenMP
// forms split work over independent outputs only and keep every reduction in
// the serial order, so both forms agree bitwise.
#pragma once

#include <cstddef>

namespace panoact::kernels {

/// Runtime switch for the OpenMP forms. Off by default.
void set_parallel(bool enabled);
bool parallel();

struct GemmArgs {
    std::size_t m = 0, k = 0, n = 0;
    bool trans_a = false;  // a stored as [k,m]
    bool trans_b = false;  // b stored as [n,k]
    bool accumulate = false;
};

// c[m,n] (+)= op(a)[m,k] * op(b)[k,n]
void gemm_serial(const double* a, const double* b, double* c, const GemmArgs& args);
void gemm_omp(const double* a, const double* b, double* c, const GemmArgs& args);
void gemm(const double* a, const double* b, double* c, const GemmArgs& args);

// Softmax over the middle extent of an [outer, n, inner] view.
void softmax_serial(const double* x, double* y, std::size_t outer, std::size_t n, std::size_t inner);
void softmax_omp(const double* x, double* y, std::size_t outer, std::size_t n, std::size_t inner);
void softmax(const double* x, double* y, std::size_t outer, std::size_t n, std::size_t inner);

struct RoiAlignArgs {
    std::size_t frames = 0, channels = 0, height = 0, width = 0;
    std::size_t individuals = 0;
    std::size_t out_h = 0, out_w = 0;
    bool shared_grid = false;  // one grid frame serves every box frame
};

// grid: [frames, channels, height, width]; boxes: [individuals, frames, 4]
// normalized (x1,y1,x2,y2); out: [individuals, frames, channels, out_h, out_w].
// One bilinear sample at the center of every output bin.
void roi_align_serial(const double* grid, const double* boxes, double* out, const RoiAlignArgs& args);
void roi_align_omp(const double* grid, const double* boxes, double* out, const RoiAlignArgs& args);
void roi_align(const double* grid, const double* boxes, double* out, const RoiAlignArgs& args);

}  // namespace panoact::kernels
