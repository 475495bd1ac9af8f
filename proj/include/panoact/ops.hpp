// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable primitives. Binary elementwise ops broadcast with numpy
// rules; every op throws ShapeError naming both operand shapes on mismatch.
#pragma once

#include <vector>

#include "panoact/tensor.hpp"

namespace panoact {

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& a) { return neg(a); }

/// a: [..., k] (leading axes flattened), b: [k, n] -> [..., n].
Tensor matmul(const Tensor& a, const Tensor& b);
/// a: [B, m, k], b: [B, k, n] (or [B, n, k] with transpose_b) -> [B, m, n].
Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b = false);

/// Swap the last two axes.
Tensor transpose(const Tensor& a);
Tensor permute(const Tensor& a, const std::vector<std::size_t>& axes);
Tensor reshape(const Tensor& a, Shape shape);
Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
/// Gather along axis 0.
Tensor index_rows(const Tensor& a, const std::vector<std::size_t>& rows);
Tensor broadcast_to(const Tensor& a, const Shape& shape);

Tensor sum(const Tensor& a);
Tensor sum(const Tensor& a, std::size_t axis, bool keepdim = false);
Tensor mean(const Tensor& a);
Tensor mean(const Tensor& a, std::size_t axis, bool keepdim = false);

Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor square(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
/// Clamp with zero gradient outside [lo, hi].
Tensor clamp(const Tensor& a, double lo, double hi);

/// Max-subtracted softmax along one axis.
Tensor softmax(const Tensor& a, std::size_t axis);

/// Normalizes over the last axis: (x - mean) / sqrt(var + eps) * gain + bias,
/// with population variance. gain and bias are [last-extent].
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

}  // namespace panoact
