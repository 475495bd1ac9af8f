// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace panoact {

GradCheckReport grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params, double h) {
    for (auto& p : params) {
        p.set_requires_grad(true);
        p.zero_grad();
    }
    f().backward();
    std::vector<std::vector<double>> analytic;
    for (auto& p : params) {
        if (p.has_grad()) {
            analytic.emplace_back(p.grad().begin(), p.grad().end());
        } else {
            analytic.emplace_back(p.numel(), 0.0);
        }
    }

    GradCheckReport report;
    NoGradGuard no_grad;
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto values = params[i].mutable_data();
        for (std::size_t j = 0; j < values.size(); ++j) {
            const double saved = values[j];
            values[j] = saved + h;
            const double up = f().item();
            values[j] = saved - h;
            const double down = f().item();
            values[j] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double a = analytic[i][j];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            const double err = std::abs(a - numeric) / denom;
            ++report.checked;
            if (err > report.max_relative_error || report.checked == 1) {
                report.max_relative_error = err;
                report.worst_param = i;
                report.worst_element = j;
                report.analytic = a;
                report.numeric = numeric;
            }
        }
    }
    return report;
}

}  // namespace panoact
