// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "panoact/kernels.hpp"
#include "panoact/tensor.hpp"

namespace panoact {

bool Box::valid() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    return in_unit(x1) && in_unit(y1) && in_unit(x2) && in_unit(y2) && x1 <= x2 && y1 <= y2;
}

BoxTrack::BoxTrack(std::size_t individuals, std::size_t frames)
    : individuals_(individuals), frames_(frames), boxes_(individuals * frames) {}

BoxTrack::BoxTrack(std::size_t individuals, std::size_t frames, std::vector<Box> boxes)
    : individuals_(individuals), frames_(frames), boxes_(std::move(boxes)) {
    if (boxes_.size() != individuals * frames) {
        throw ShapeError("box track needs " + std::to_string(individuals * frames) + " boxes, got " +
                         std::to_string(boxes_.size()));
    }
}

std::vector<double> BoxTrack::flat() const {
    std::vector<double> out;
    out.reserve(boxes_.size() * 4);
    for (const auto& b : boxes_) out.insert(out.end(), {b.x1, b.y1, b.x2, b.y2});
    return out;
}

void BoxTrack::validate() const {
    for (std::size_t i = 0; i < individuals_; ++i) {
        for (std::size_t t = 0; t < frames_; ++t) {
            const auto& b = at(i, t);
            if (!b.valid()) {
                throw DataError("box of individual " + std::to_string(i) + " at frame " + std::to_string(t) +
                                " is outside [0,1] or inverted");
            }
        }
    }
}

ProximityMetric parse_proximity(std::string_view name) {
    if (name == "giou_s") return ProximityMetric::GiouSpatial;
    if (name == "tgiou") return ProximityMetric::Tgiou;
    if (name == "euclid_s") return ProximityMetric::EuclidSpatial;
    if (name == "euclid_st") return ProximityMetric::EuclidSpatioTemporal;
    throw ConfigError("unknown proximity metric '" + std::string(name) +
                      "' (expected euclid_s, euclid_st, giou_s, tgiou)");
}

std::string to_string(ProximityMetric metric) {
    switch (metric) {
        case ProximityMetric::GiouSpatial: return "giou_s";
        case ProximityMetric::Tgiou: return "tgiou";
        case ProximityMetric::EuclidSpatial: return "euclid_s";
        case ProximityMetric::EuclidSpatioTemporal: return "euclid_st";
    }
    return "?";
}

double giou(const Box& a, const Box& b) {
    const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
    const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    const double enclosing =
        (std::max(a.x2, b.x2) - std::min(a.x1, b.x1)) * (std::max(a.y2, b.y2) - std::min(a.y1, b.y1));
    double iou = 0.0;
    if (uni > 0.0) {
        iou = inter / uni;
    } else if (a == b) {
        iou = 1.0;
    }
    const double penalty = enclosing > 0.0 ? (enclosing - uni) / enclosing : 0.0;
    return iou - penalty;
}

double tgiou(std::span<const Box> a, std::span<const Box> b) {
    if (a.size() != b.size()) throw ShapeError("tgiou: tracks of different length");
    if (a.empty()) throw ShapeError("tgiou: empty tracks");
    const double first = giou(a[0], b[0]);
    double total = first;
    bool constant = true;
    for (std::size_t t = 1; t < a.size(); ++t) {
        const double g = giou(a[t], b[t]);
        constant = constant && g == first;
        total += g;
    }
    // Summing T copies and dividing by T is not exact in floating point.
    return constant ? first : total / static_cast<double>(a.size());
}

double euclid_proximity(std::span<const Box> a, std::span<const Box> b, bool spatio_temporal) {
    if (a.size() != b.size() || a.empty()) throw ShapeError("euclid_proximity: mismatched or empty tracks");
    const std::size_t frames = spatio_temporal ? a.size() : 1;
    double total = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
        total += std::hypot(a[t].center_x() - b[t].center_x(), a[t].center_y() - b[t].center_y());
    }
    return -total / static_cast<double>(frames);
}

double proximity(std::span<const Box> a, std::span<const Box> b, ProximityMetric metric) {
    switch (metric) {
        case ProximityMetric::GiouSpatial: return giou(a.front(), b.front());
        case ProximityMetric::Tgiou: return tgiou(a, b);
        case ProximityMetric::EuclidSpatial: return euclid_proximity(a, b, false);
        case ProximityMetric::EuclidSpatioTemporal: return euclid_proximity(a, b, true);
    }
    return 0.0;
}

namespace {
void fill_row(const BoxTrack& track, ProximityMatrix& m, std::size_t i) {
    const std::size_t n = track.individuals();
    for (std::size_t j = i; j < n; ++j) {
        const double v = proximity(track.row(i), track.row(j), m.metric);
        m.values[i * n + j] = v;
        m.values[j * n + i] = v;
    }
}

ProximityMatrix empty_matrix(const BoxTrack& track, ProximityMetric metric) {
    if (track.frames() == 0) throw ShapeError("proximity_matrix: track has no frames");
    ProximityMatrix m;
    m.size = track.individuals();
    m.metric = metric;
    m.values.assign(m.size * m.size, 0.0);
    return m;
}
}  // namespace

ProximityMatrix proximity_matrix_serial(const BoxTrack& track, ProximityMetric metric) {
    auto m = empty_matrix(track, metric);
    for (std::size_t i = 0; i < m.size; ++i) fill_row(track, m, i);
    return m;
}

ProximityMatrix proximity_matrix_omp(const BoxTrack& track, ProximityMetric metric) {
    auto m = empty_matrix(track, metric);
    const auto n = static_cast<std::int64_t>(m.size);
    // Row i writes (i, j>=i) and its mirror; rows touch disjoint cells.
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) fill_row(track, m, static_cast<std::size_t>(i));
    return m;
}

ProximityMatrix proximity_matrix(const BoxTrack& track, ProximityMetric metric) {
    return kernels::parallel() ? proximity_matrix_omp(track, metric) : proximity_matrix_serial(track, metric);
}

}  // namespace panoact
