// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Hand-rolled generators and plain-loop reference implementations shared by
// the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "panoact/evaluation.hpp"
#include "panoact/geometry.hpp"
#include "panoact/kmeans.hpp"
#include "panoact/nn.hpp"

namespace testing {

using namespace panoact;

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double normal(double stddev = 1.0) { return std::normal_distribution<double>(0.0, stddev)(rng); }
    std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }
    bool coin() { return index(0, 1) == 1; }

    std::vector<double> values(std::size_t n, double lo = -1.0, double hi = 1.0) {
        std::vector<double> v(n);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }
    Tensor tensor(Shape shape, double lo = -1.0, double hi = 1.0, bool requires_grad = false) {
        auto v = values(numel(shape), lo, hi);
        return Tensor::from(std::move(shape), std::move(v), requires_grad);
    }
    Box box(double max_size = 0.5) {
        const double w = uniform(0.0, max_size), h = uniform(0.0, max_size);
        const double x = uniform(0.0, 1.0 - w), y = uniform(0.0, 1.0 - h);
        return Box{x, y, x + w, y + h};
    }
    BoxTrack track(std::size_t n, std::size_t t, double max_size = 0.3) {
        BoxTrack tr(n, t);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t f = 0; f < t; ++f) tr.at(i, f) = box(max_size);
        }
        return tr;
    }
    /// Random partition of n items into at most k_max groups, dense labels.
    GroupAssignment partition(std::size_t n, std::size_t k_max) {
        std::vector<std::size_t> raw(n);
        for (auto& l : raw) l = index(0, k_max - 1);
        return GroupAssignment::from_labels(raw);
    }
    /// Random label set drawn from [0, classes).
    std::vector<std::size_t> label_set(std::size_t classes, std::size_t max_size) {
        std::vector<std::size_t> s;
        const std::size_t size = index(0, max_size);
        for (std::size_t k = 0; k < size; ++k) s.push_back(index(0, classes - 1));
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    }
};

inline void randomize(ParamStore& store, std::uint64_t seed, double scale = 0.5) {
    Gen g(seed);
    for (auto& [name, t] : store.items()) {
        for (auto& x : t.mutable_data()) x = g.uniform(-scale, scale);
    }
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return a.size() == b.size() ? m : INFINITY;
}

inline bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
    return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size_bytes()) == 0);
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("panoact-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// All permutations of max(|pred|,|gt|) columns; dummies beyond pred.size().
// Returns the lexicographically smallest optimal column vector.
inline std::vector<std::size_t> brute_force_match(const std::vector<LabelSet>& pred, const std::vector<LabelSet>& gt,
                                           double* best_total) {
    const std::size_t n = std::max(pred.size(), gt.size());
    std::vector<std::size_t> perm(n), best;
    std::iota(perm.begin(), perm.end(), 0);
    double best_value = -1;
    do {
        double v = 0;
        for (std::size_t g = 0; g < gt.size(); ++g) {
            if (perm[g] < pred.size()) v += group_set_iou(pred[perm[g]], gt[g]);
        }
        if (v > best_value + 1e-9) best_value = v, best = perm;  // permutations arrive in lexicographic order
    } while (std::next_permutation(perm.begin(), perm.end()));
    *best_total = best_value;
    return best;
}

inline double mat_iou_loop(const GroupAssignment& p, const GroupAssignment& g) {
    double inter = 0, uni = 0;
    for (std::size_t i = 0; i < g.individuals(); ++i) {
        for (std::size_t j = 0; j < g.individuals(); ++j) {
            if (i == j) continue;
            const bool a = p.labels[i] == p.labels[j], b = g.labels[i] == g.labels[j];
            inter += a && b;
            uni += a || b;
        }
    }
    return uni == 0 ? 1.0 : inter / uni;
}

inline double f1_from_counts(double c, double p, double t) {
    if (c == 0) return 0;
    return 2 * (c / p) * (c / t) / (c / p + c / t);
}

/// Minimum within-cluster SSE over every partition of the points into exactly
/// k nonempty blocks (restricted growth strings).
inline double exhaustive_min_sse(const PointSet& points, std::size_t k) {
    const std::size_t n = points.count;
    std::vector<std::size_t> labels(n, 0);
    double best = INFINITY;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
        if (n - i < k - used) return;
        if (i == n) {
            if (used == k) best = std::min(best, within_cluster_sse(points, labels, k));
            return;
        }
        for (std::size_t g = 0; g <= std::min(used, k - 1); ++g) {
            labels[i] = g;
            rec(i + 1, std::max(used, g + 1));
        }
    };
    rec(0, 0);
    return best;
}

/// Plain-loop reference math on row-major matrices.
namespace ref {

struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;
    double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

inline Mat of(const Tensor& t) {
    const std::size_t cols = t.dim(t.rank() - 1);
    return Mat{t.numel() / cols, cols, std::vector<double>(t.data().begin(), t.data().end())};
}

inline Mat matmul(const Mat& a, const Mat& b) {
    Mat c{a.rows, b.cols, std::vector<double>(a.rows * b.cols, 0.0)};
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    }
    return c;
}

inline Mat linear(const Mat& x, const Linear& l) {
    Mat y = matmul(x, of(l.weight));
    if (l.bias.defined()) {
        for (std::size_t i = 0; i < y.rows; ++i) {
            for (std::size_t j = 0; j < y.cols; ++j) y(i, j) += l.bias.data()[j];
        }
    }
    return y;
}

inline Mat add(Mat a, const Mat& b) {
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
    return a;
}

inline Mat layer_norm(const Mat& x, const Tensor& gain, const Tensor& bias, double eps) {
    Mat y = x;
    for (std::size_t i = 0; i < x.rows; ++i) {
        double mean = 0;
        for (std::size_t j = 0; j < x.cols; ++j) mean += x(i, j);
        mean /= static_cast<double>(x.cols);
        double var = 0;
        for (std::size_t j = 0; j < x.cols; ++j) var += (x(i, j) - mean) * (x(i, j) - mean);
        var /= static_cast<double>(x.cols);
        for (std::size_t j = 0; j < x.cols; ++j) {
            y(i, j) = (x(i, j) - mean) / std::sqrt(var + eps) * gain.data()[j] + bias.data()[j];
        }
    }
    return y;
}

inline std::vector<double> softmax(const std::vector<double>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    std::vector<double> e(z.size());
    double s = 0;
    for (std::size_t i = 0; i < z.size(); ++i) s += (e[i] = std::exp(z[i] - m));
    for (auto& x : e) x /= s;
    return e;
}

inline Mat attention(const Mat& x, const MhsaParams& p) {
    const Mat q = linear(x, p.query), k = linear(x, p.key), v = linear(x, p.value);
    const std::size_t d = x.cols, dh = d / p.heads;
    Mat ctx{x.rows, d, std::vector<double>(x.rows * d, 0.0)};
    for (std::size_t h = 0; h < p.heads; ++h) {
        for (std::size_t i = 0; i < x.rows; ++i) {
            std::vector<double> z(x.rows);
            for (std::size_t j = 0; j < x.rows; ++j) {
                double s = 0;
                for (std::size_t c = 0; c < dh; ++c) s += q(i, h * dh + c) * k(j, h * dh + c);
                z[j] = s / std::sqrt(static_cast<double>(dh));
            }
            const auto w = softmax(z);
            for (std::size_t j = 0; j < x.rows; ++j) {
                for (std::size_t c = 0; c < dh; ++c) ctx(i, h * dh + c) += w[j] * v(j, h * dh + c);
            }
        }
    }
    return linear(ctx, p.output);
}

inline Mat encoder_block(const Mat& x, const EncoderBlockParams& p) {
    const Mat h = add(x, attention(layer_norm(x, p.norm1_gain, p.norm1_bias, kLayerNormEps), p.attention));
    Mat f = linear(layer_norm(h, p.norm2_gain, p.norm2_bias, kLayerNormEps), p.ffn_in);
    for (auto& e : f.v) e = std::max(0.0, e);
    return add(h, linear(f, p.ffn_out));
}

inline Mat rows(const Mat& m, const std::vector<std::size_t>& idx) {
    Mat out{idx.size(), m.cols, {}};
    for (std::size_t r : idx) out.v.insert(out.v.end(), m.v.begin() + r * m.cols, m.v.begin() + (r + 1) * m.cols);
    return out;
}

inline Mat stack(const Mat& a, const Mat& b) {
    Mat out{a.rows + b.rows, a.cols, a.v};
    out.v.insert(out.v.end(), b.v.begin(), b.v.end());
    return out;
}

}  // namespace ref

}  // namespace testing
