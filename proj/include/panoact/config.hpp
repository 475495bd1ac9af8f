// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: one JSON object, nested sections or flat dotted keys
// ("model.d": 16). Unknown keys are rejected.
#pragma once

#include <filesystem>

#include <json.hpp>

#include "panoact/dataset.hpp"
#include "panoact/model.hpp"
#include "panoact/training.hpp"

namespace panoact {

struct RunConfig {
    std::uint64_t seed = 0;
    DatasetConfig data;  // data.scenes is the training split size
    std::size_t val_scenes = 50;
    std::filesystem::path data_dir = "data";
    ModelConfig model;  // input dims follow data
    TrainConfig train;
    LossWeights loss;
    GroupingSource grouping = GroupingSource::Predicted;
    std::filesystem::path out = "runs/default";

    /// Desk-scale defaults: 200 training scenes, d = 32, two layers, 30 epochs.
    RunConfig();

    /// Copies the shared seed and the data dims into the sub-configs and
    /// validates everything.
    void resolve();
};

/// {"a.b": 1} -> {"a": {"b": 1}}; nested objects are merged recursively.
nlohmann::json expand_dotted(const nlohmann::json& j);

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep the defaults of `base`.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = RunConfig());
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace panoact
