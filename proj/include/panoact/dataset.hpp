// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset files come in pairs: `<name>.jsonl` holds a manifest line and one
// JSON record per sample; `<name>.bin` holds the little-endian float32
// features those records point into.
#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "panoact/synthdata.hpp"

namespace panoact {

struct Dataset {
    nlohmann::json manifest = nlohmann::json::object();
    std::vector<SceneSample> samples;
};

std::filesystem::path blob_path_for(const std::filesystem::path& manifest_path);

/// `spec` is stored verbatim in the manifest.
void write_dataset(const std::vector<SceneSample>& samples, const std::filesystem::path& path,
                   const nlohmann::json& spec = nlohmann::json::object());

/// Throws DataError naming the line, sample index or byte range at fault.
Dataset read_dataset(const std::filesystem::path& path);

nlohmann::json to_json(const DatasetConfig& config);
DatasetConfig dataset_config_from_json(const nlohmann::json& j);

}  // namespace panoact
