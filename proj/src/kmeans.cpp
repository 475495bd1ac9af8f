// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "panoact/tensor.hpp"

namespace panoact {

std::vector<std::vector<std::size_t>> GroupAssignment::members() const {
    std::vector<std::vector<std::size_t>> out(count);
    for (std::size_t i = 0; i < labels.size(); ++i) out.at(labels[i]).push_back(i);
    return out;
}

void GroupAssignment::validate() const {
    std::vector<bool> used(count, false);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= count) {
            throw DataError("individual " + std::to_string(i) + " has group " + std::to_string(labels[i]) +
                            " outside [0, " + std::to_string(count) + ")");
        }
        used[labels[i]] = true;
    }
    for (std::size_t g = 0; g < count; ++g) {
        if (!used[g]) throw DataError("group " + std::to_string(g) + " has no members");
    }
}

GroupAssignment GroupAssignment::from_labels(std::vector<std::size_t> raw) {
    GroupAssignment out;
    std::vector<std::pair<std::size_t, std::size_t>> remap;  // raw -> dense
    out.labels.reserve(raw.size());
    for (auto r : raw) {
        auto it = std::find_if(remap.begin(), remap.end(), [r](const auto& p) { return p.first == r; });
        if (it == remap.end()) {
            remap.emplace_back(r, remap.size());
            out.labels.push_back(remap.size() - 1);
        } else {
            out.labels.push_back(it->second);
        }
    }
    out.count = remap.size();
    return out;
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return s;
}

std::vector<double> centroids_of(const PointSet& p, const std::vector<std::size_t>& labels, std::size_t k,
                                 std::vector<std::size_t>& sizes) {
    std::vector<double> c(k * p.dim, 0.0);
    sizes.assign(k, 0);
    for (std::size_t i = 0; i < p.count; ++i) {
        ++sizes[labels[i]];
        for (std::size_t d = 0; d < p.dim; ++d) c[labels[i] * p.dim + d] += p.row(i)[d];
    }
    for (std::size_t g = 0; g < k; ++g) {
        if (sizes[g] == 0) continue;
        for (std::size_t d = 0; d < p.dim; ++d) c[g * p.dim + d] /= static_cast<double>(sizes[g]);
    }
    return c;
}

std::size_t nearest(const PointSet& p, const std::vector<double>& centers, std::size_t k, std::size_t i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < k; ++g) {
        const double d = sq_dist(p.row(i), centers.data() + g * p.dim, p.dim);
        if (d < best_d) {
            best_d = d;
            best = g;
        }
    }
    return best;
}

std::vector<double> seed_plus_plus(const PointSet& p, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> chosen;
    std::uniform_int_distribution<std::size_t> first(0, p.count - 1);
    chosen.push_back(first(rng));
    std::vector<double> d2(p.count, std::numeric_limits<double>::infinity());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (chosen.size() < k) {
        const double* last = p.row(chosen.back());
        double total = 0.0;
        for (std::size_t i = 0; i < p.count; ++i) {
            d2[i] = std::min(d2[i], sq_dist(p.row(i), last, p.dim));
            total += d2[i];
        }
        std::size_t pick = p.count;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < p.count; ++i) {
                if (d2[i] <= 0.0) continue;
                acc += d2[i];
                pick = i;
                if (acc > target) break;
            }
        } else {
            // All remaining points coincide with a center.
            for (std::size_t i = 0; i < p.count; ++i) {
                if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
                    pick = i;
                    break;
                }
            }
        }
        chosen.push_back(pick);
    }
    std::vector<double> centers(k * p.dim);
    for (std::size_t g = 0; g < k; ++g) std::copy_n(p.row(chosen[g]), p.dim, centers.begin() + g * p.dim);
    return centers;
}

// Moves farthest points into empty clusters until none is empty.
void repair_empty(const PointSet& p, std::vector<std::size_t>& labels, std::size_t k) {
    std::vector<std::size_t> sizes;
    auto centers = centroids_of(p, labels, k, sizes);
    for (std::size_t g = 0; g < k; ++g) {
        if (sizes[g] != 0) continue;
        std::size_t far = p.count;
        double far_d = -1.0;
        for (std::size_t i = 0; i < p.count; ++i) {
            if (sizes[labels[i]] < 2) continue;
            const double d = sq_dist(p.row(i), centers.data() + labels[i] * p.dim, p.dim);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        labels[far] = g;
        centers = centroids_of(p, labels, k, sizes);
    }
}

// Hartigan-style single-point moves; each accepted move strictly lowers SSE.
void refine_moves(const PointSet& p, std::vector<std::size_t>& labels, std::size_t k) {
    std::vector<std::size_t> sizes;
    auto centers = centroids_of(p, labels, k, sizes);
    bool moved = true;
    std::size_t guard = 0;
    while (moved && guard++ < 1000) {
        moved = false;
        for (std::size_t i = 0; i < p.count; ++i) {
            const std::size_t from = labels[i];
            if (sizes[from] < 2) continue;
            const double nf = static_cast<double>(sizes[from]);
            const double remove_gain = nf / (nf - 1.0) * sq_dist(p.row(i), centers.data() + from * p.dim, p.dim);
            std::size_t best = from;
            double best_cost = remove_gain;
            for (std::size_t g = 0; g < k; ++g) {
                if (g == from) continue;
                const double ng = static_cast<double>(sizes[g]);
                const double cost = ng / (ng + 1.0) * sq_dist(p.row(i), centers.data() + g * p.dim, p.dim);
                if (cost < best_cost * (1.0 - 1e-12)) {
                    best_cost = cost;
                    best = g;
                }
            }
            if (best != from) {
                labels[i] = best;
                centers = centroids_of(p, labels, k, sizes);
                moved = true;
            }
        }
    }
}

}  // namespace

double within_cluster_sse(const PointSet& points, const std::vector<std::size_t>& labels, std::size_t k) {
    std::vector<std::size_t> sizes;
    const auto centers = centroids_of(points, labels, k, sizes);
    double sse = 0.0;
    for (std::size_t i = 0; i < points.count; ++i) {
        sse += sq_dist(points.row(i), centers.data() + labels[i] * points.dim, points.dim);
    }
    return sse;
}

KMeansResult kmeans_groups(const PointSet& points, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
    if (points.count == 0) throw ShapeError("kmeans: no points");
    if (k == 0 || k > points.count) {
        throw ConfigError("kmeans: cannot form " + std::to_string(k) + " groups from " +
                          std::to_string(points.count) + " individuals");
    }
    if (points.values.size() != points.count * points.dim) throw ShapeError("kmeans: point buffer size mismatch");

    std::mt19937_64 rng(seed);
    auto centers = seed_plus_plus(points, k, rng);
    std::vector<std::size_t> labels(points.count);
    for (std::size_t i = 0; i < points.count; ++i) labels[i] = nearest(points, centers, k, i);

    KMeansResult result;
    {
        // SSE against the seeded centers themselves.
        double s = 0.0;
        for (std::size_t i = 0; i < points.count; ++i) {
            s += sq_dist(points.row(i), centers.data() + labels[i] * points.dim, points.dim);
        }
        result.initial_sse = s;
    }
    repair_empty(points, labels, k);

    std::vector<std::size_t> sizes;
    for (std::size_t it = 0; it < max_iters; ++it) {
        result.iterations = it + 1;
        centers = centroids_of(points, labels, k, sizes);
        bool changed = false;
        for (std::size_t i = 0; i < points.count; ++i) {
            const std::size_t g = nearest(points, centers, k, i);
            if (g != labels[i]) {
                labels[i] = g;
                changed = true;
            }
        }
        repair_empty(points, labels, k);
        if (!changed) break;
    }
    refine_moves(points, labels, k);

    result.sse = within_cluster_sse(points, labels, k);
    result.groups = GroupAssignment::from_labels(labels);
    return result;
}

KMeansResult kmeans_best_of(const PointSet& points, std::size_t k, std::uint64_t base_seed, std::size_t restarts,
                            std::size_t max_iters) {
    KMeansResult best;
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        auto res = kmeans_groups(points, k, base_seed + r, max_iters);
        if (r == 0 || res.sse < best.sse) best = std::move(res);
    }
    return best;
}

}  // namespace panoact
