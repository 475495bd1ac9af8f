// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace panoact {

/// Axis-aligned box in normalized scene coordinates, top-left / bottom-right.
struct Box {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    double area() const { return (x2 - x1) * (y2 - y1); }
    double center_x() const { return 0.5 * (x1 + x2); }
    double center_y() const { return 0.5 * (y1 + y2); }
    bool valid() const;
    friend bool operator==(const Box&, const Box&) = default;
};

/// Boxes of N individuals over T frames, individual-major.
class BoxTrack {
public:
    BoxTrack() = default;
    BoxTrack(std::size_t individuals, std::size_t frames);
    BoxTrack(std::size_t individuals, std::size_t frames, std::vector<Box> boxes);

    std::size_t individuals() const { return individuals_; }
    std::size_t frames() const { return frames_; }
    Box& at(std::size_t i, std::size_t t) { return boxes_[i * frames_ + t]; }
    const Box& at(std::size_t i, std::size_t t) const { return boxes_[i * frames_ + t]; }
    std::span<const Box> row(std::size_t i) const { return {boxes_.data() + i * frames_, frames_}; }
    const std::vector<Box>& boxes() const { return boxes_; }
    /// Flat [N, T, 4] coordinates.
    std::vector<double> flat() const;

    /// Throws DataError if any box is outside [0,1] or inverted.
    void validate() const;
    friend bool operator==(const BoxTrack&, const BoxTrack&) = default;

private:
    std::size_t individuals_ = 0, frames_ = 0;
    std::vector<Box> boxes_;
};

enum class ProximityMetric { GiouSpatial, Tgiou, EuclidSpatial, EuclidSpatioTemporal };

ProximityMetric parse_proximity(std::string_view name);
std::string to_string(ProximityMetric metric);

/// IoU(a,b) minus the share of the smallest enclosing box not covered by the
/// union. Two identical zero-area boxes score 1; distinct boxes whose
/// enclosing box has zero area get no enclosure penalty.
double giou(const Box& a, const Box& b);

/// Mean per-frame GIoU of two equally long tracks.
double tgiou(std::span<const Box> a, std::span<const Box> b);

/// Negated center distance, first frame only or averaged over frames, so that
/// larger means closer as with the GIoU family.
double euclid_proximity(std::span<const Box> a, std::span<const Box> b, bool spatio_temporal);

double proximity(std::span<const Box> a, std::span<const Box> b, ProximityMetric metric);

struct ProximityMatrix {
    std::size_t size = 0;
    ProximityMetric metric = ProximityMetric::Tgiou;
    std::vector<double> values;  // row-major size x size

    double operator()(std::size_t i, std::size_t j) const { return values[i * size + j]; }
};

ProximityMatrix proximity_matrix_serial(const BoxTrack& track, ProximityMetric metric);
ProximityMatrix proximity_matrix_omp(const BoxTrack& track, ProximityMetric metric);
ProximityMatrix proximity_matrix(const BoxTrack& track, ProximityMetric metric);

}  // namespace panoact
