// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panoact/nn.hpp"

namespace panoact {

struct AdamConfig {
    double lr = 4e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-2;
};

/// Adam with bias correction and decoupled weight decay. Moments are kept in
/// the same order as the ParamStore they were created for.
class AdamState {
public:
    AdamState() = default;
    AdamState(const ParamStore& params, AdamConfig config);

    /// One update of every parameter from its accumulated gradient. Throws if
    /// a parameter has no gradient.
    void step(ParamStore& params);

    AdamConfig& config() { return config_; }
    const AdamConfig& config() const { return config_; }
    std::uint64_t steps() const { return steps_; }
    void set_steps(std::uint64_t steps) { steps_ = steps; }

    std::vector<Tensor>& first_moments() { return m_; }
    std::vector<Tensor>& second_moments() { return v_; }
    const std::vector<Tensor>& first_moments() const { return m_; }
    const std::vector<Tensor>& second_moments() const { return v_; }

private:
    AdamConfig config_;
    std::uint64_t steps_ = 0;
    std::vector<Tensor> m_, v_;
};

}  // namespace panoact
