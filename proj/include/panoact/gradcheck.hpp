// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "panoact/tensor.hpp"

namespace panoact {

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_param = 0;   // index into the checked tensors
    std::size_t worst_element = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    std::size_t checked = 0;
};

/// Compares the reverse-mode gradient of a scalar function against central
/// differences (f(x+h) - f(x-h)) / 2h, element by element. Relative error
/// uses max(|analytic|, |numeric|, 1e-8) as denominator. f must rebuild its
/// graph from the current parameter values on every call.
GradCheckReport grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params, double h = 1e-5);

}  // namespace panoact
