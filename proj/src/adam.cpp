// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/adam.hpp"

#include <cmath>

namespace panoact {

AdamState::AdamState(const ParamStore& params, AdamConfig config) : config_(config) {
    for (const auto& [name, t] : params.items()) {
        m_.push_back(Tensor::zeros(t.shape()));
        v_.push_back(Tensor::zeros(t.shape()));
    }
}

void AdamState::step(ParamStore& params) {
    auto& items = params.items();
    if (items.size() != m_.size()) {
        throw ConfigError("optimizer holds " + std::to_string(m_.size()) + " moments for " +
                          std::to_string(items.size()) + " parameters");
    }
    for (const auto& [name, t] : items) {
        if (!t.has_grad()) throw NumericError("parameter '" + name + "' has no gradient");
    }
    ++steps_;
    const auto& c = config_;
    const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(steps_));
    const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(steps_));
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto& param = items[i].second;
        auto p = param.mutable_data();
        auto g = param.grad();
        auto m = m_[i].mutable_data();
        auto v = v_[i].mutable_data();
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
            v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
            const double mhat = m[j] / correction1;
            const double vhat = v[j] / correction2;
            p[j] -= c.lr * (mhat / (std::sqrt(vhat) + c.eps) + c.weight_decay * p[j]);
        }
    }
}

}  // namespace panoact
