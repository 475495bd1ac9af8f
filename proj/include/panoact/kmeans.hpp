// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace panoact {

/// Partition of individuals into groups. Labels are dense, 0-based, and
/// numbered by first occurrence.
struct GroupAssignment {
    std::vector<std::size_t> labels;
    std::size_t count = 0;

    std::size_t individuals() const { return labels.size(); }
    std::vector<std::vector<std::size_t>> members() const;
    /// Throws DataError unless every label is in range and every group used.
    void validate() const;

    static GroupAssignment from_labels(std::vector<std::size_t> raw);
    friend bool operator==(const GroupAssignment&, const GroupAssignment&) = default;
};

struct KMeansResult {
    GroupAssignment groups;
    double sse = 0.0;          // within-cluster sum of squared distances
    double initial_sse = 0.0;  // after k-means++ seeding
    std::size_t iterations = 0;
};

/// Row-major points [n, dim].
struct PointSet {
    std::span<const double> values;
    std::size_t count = 0;
    std::size_t dim = 0;

    const double* row(std::size_t i) const { return values.data() + i * dim; }
};

/// Lloyd iterations from k-means++ seeding, followed by single-point moves
/// until no move lowers the SSE. Empty clusters take the point farthest from
/// its centroid (lowest index on ties). Deterministic for a given seed.
KMeansResult kmeans_groups(const PointSet& points, std::size_t k, std::uint64_t seed, std::size_t max_iters = 100);

/// Lowest-SSE result over seeds base_seed .. base_seed + restarts - 1.
KMeansResult kmeans_best_of(const PointSet& points, std::size_t k, std::uint64_t base_seed, std::size_t restarts,
                            std::size_t max_iters = 100);

double within_cluster_sse(const PointSet& points, const std::vector<std::size_t>& labels, std::size_t k);

}  // namespace panoact
