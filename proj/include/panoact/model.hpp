// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// The full recognizer: feature stem, panoramic positional embedding, axial
// attention, social relation estimation, grouping, the activity transformer
// and the three classifiers.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "panoact/checkpoint.hpp"
#include "panoact/dpatr.hpp"
#include "panoact/relation.hpp"
#include "panoact/synthdata.hpp"

namespace panoact {

enum class GroupingSource { Predicted, GtGroups, GtCount };
GroupingSource parse_grouping(std::string_view name);
std::string to_string(GroupingSource source);

struct ModelConfig {
    std::size_t feature_dim = 32;  // input channels
    std::size_t d = 32;
    std::size_t heads = 2;
    std::size_t layers = 2;
    std::size_t frames = 3;
    std::size_t crop_h = 2, crop_w = 2;
    std::size_t grid_h = 12, grid_w = 128;
    ClassCounts classes;
    PpeMode ppe = PpeMode::Both;
    ProximityMetric proximity = ProximityMetric::Tgiou;
    RelationMode relation = RelationMode::Both;
    Structure structure = Structure::Dpatr;
    std::size_t kmeans_restarts = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

/// Everything computed before grouping.
struct Encoded {
    Tensor pooled;          // [N, d]
    Tensor rs;              // [N, N]
    Tensor rp;              // [N, N], constant
    Tensor relation;        // [N, N]
    Tensor count_fraction;  // [1]
    Tensor aux;             // [N, C_idv]
};

struct Recognition {
    Encoded encoded;
    GroupAssignment groups;
    ActivityScores scores;
};

class Model {
public:
    explicit Model(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    ParamStore& params() { return store_; }
    const ParamStore& params() const { return store_; }

    /// Throws DataError when the sample does not fit the configured dims.
    void check_sample(const SceneSample& sample) const;
    Encoded encode(const SceneSample& sample) const;
    GroupAssignment group(const Encoded& encoded, const SceneSample& sample, GroupingSource source) const;
    ActivityScores recognize(const Tensor& pooled, const GroupAssignment& groups) const;
    Recognition forward(const SceneSample& sample, GroupingSource source) const;

    /// Parameters keyed by name; meta carries the model config.
    Checkpoint to_checkpoint() const;
    /// Copies values for every parameter; names and shapes must match.
    void load(const Checkpoint& ckpt);
    static Model from_checkpoint(const Checkpoint& ckpt);

private:
    ModelConfig config_;
    ParamStore store_;
    PanoramicEmbedding embedding_;
    Linear stem_;
    AxialAttentionParams axial_;
    Tensor w_theta_, w_phi_;
    GroupCountHead count_head_;
    Linear aux_head_;
    TokenBank tokens_;
    std::vector<DpatrLayerParams> layers_;
    AltStructureParams alt_;
    ActivityHeads heads_;
};

/// Best of `restarts` k-means runs on the rows of points [N, d]. The model
/// clusters R F; clustering a relation matrix alone passes it as points.
GroupAssignment cluster_rows(const Tensor& points, std::size_t k, std::uint64_t seed, std::size_t restarts);

}  // namespace panoact
