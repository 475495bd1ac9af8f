// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint file: one JSON manifest line (name -> shape, dtype, byte offset)
// followed by a single little-endian float64 blob holding every tensor.
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "panoact/tensor.hpp"

namespace panoact {

struct Checkpoint {
    nlohmann::json meta = nlohmann::json::object();
    std::vector<std::pair<std::string, Tensor>> tensors;

    const Tensor& find(const std::string& name) const;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws DataError naming the offending tensor or offset on any mismatch.
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace panoact
