// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic panoramic scenes with known groups and three-level labels.
//
// Groups move by archetype (walk, stand, converge, diverge). Distractors are
// singletons that start next to a foreign group and walk away from it, so
// first-frame proximity mistakes them for members while the track does not.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "panoact/geometry.hpp"
#include "panoact/kmeans.hpp"
#include "panoact/tensor.hpp"

namespace panoact {

enum class DatasetFlavor { Grid, Cropped };
DatasetFlavor parse_flavor(std::string_view name);
std::string to_string(DatasetFlavor flavor);

enum class Archetype : std::size_t { Walk = 0, Stand = 1, Converge = 2, Diverge = 3 };
constexpr std::size_t kArchetypeCount = 4;

struct ClassCounts {
    std::size_t individual = 27;
    std::size_t social = 11;
    std::size_t global = 7;
    friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// Smallest class counts the label scheme needs.
constexpr ClassCounts kMinClassCounts{27, 7, 7};

struct SceneSpec {
    std::uint64_t seed = 0;
    std::size_t individuals = 6;
    std::size_t groups = 3;  // including distractor singletons
    std::size_t frames = 3;
    std::size_t grid_h = 12, grid_w = 128;
    std::size_t feature_dim = 32;
    double noise = 0.1;
    std::size_t distractors = 0;
    std::size_t crop_h = 2, crop_w = 2;
    DatasetFlavor flavor = DatasetFlavor::Cropped;
    ClassCounts classes;
    std::uint64_t prototype_seed = 7;
    std::size_t max_group_size = 0;  // 0: unbounded
    /// Optional archetype per regular (non-distractor) group; sampled if empty.
    std::vector<Archetype> archetypes;

    void validate() const;
};

struct SceneSample {
    std::uint64_t seed = 0;
    DatasetFlavor flavor = DatasetFlavor::Cropped;
    std::size_t frames = 0, feature_dim = 0;
    std::size_t grid_h = 0, grid_w = 0, crop_h = 0, crop_w = 0;
    /// grid: [T, D, H, W]; cropped: [N, T, D, crop_h, crop_w].
    std::vector<float> features;
    BoxTrack track;
    GroupAssignment groups;
    std::vector<std::vector<std::size_t>> individual_labels;  // positive class ids, sorted
    std::vector<std::vector<std::size_t>> group_labels;       // per GT group
    std::vector<std::size_t> global_labels;
    std::vector<std::size_t> group_archetypes;  // per GT group
    std::vector<bool> distractor;               // per individual
    ClassCounts classes;

    std::size_t individuals() const { return track.individuals(); }
    Shape feature_shape() const;
    /// Individual crops [N, T, D, crop_h, crop_w]; grid scenes go through roi_align.
    Tensor crops() const;
    friend bool operator==(const SceneSample&, const SceneSample&) = default;
};

/// Prototype vector rendered for an individual with the given archetype and
/// positive actions.
std::vector<double> appearance(std::uint64_t prototype_seed, std::size_t feature_dim, std::size_t archetype,
                               const std::vector<std::size_t>& actions, std::size_t individual_classes);

/// Throws ConfigError on an invalid spec and DataError when the boxes cannot
/// be placed inside the scene or rendered crops fail the prototype check.
SceneSample generate_scene(const SceneSpec& spec);

/// Binary co-membership matrix, 1 on the diagonal.
std::vector<double> relation_targets(const GroupAssignment& groups);

struct DatasetConfig {
    std::size_t scenes = 200;
    std::uint64_t seed = 1;
    std::size_t min_individuals = 4, max_individuals = 8;
    std::size_t max_group_size = 3;
    double distractor_rate = 0.5;  // chance a scene carries one distractor
    SceneSpec base;                // frames, grid, dims, noise, crop, flavor, classes
};

/// Scene specs drawn from a seed stream; distinct streams give disjoint seeds.
std::vector<SceneSpec> plan_dataset(const DatasetConfig& config, std::uint64_t stream);
std::vector<SceneSample> generate_dataset(const DatasetConfig& config, std::uint64_t stream);

}  // namespace panoact
