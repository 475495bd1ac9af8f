// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/relation.hpp"

#include <algorithm>
#include <cmath>

#include "panoact/kernels.hpp"

namespace panoact {

PpeMode parse_ppe(std::string_view name) {
    if (name == "off") return PpeMode::Off;
    if (name == "spatial") return PpeMode::Spatial;
    if (name == "temporal") return PpeMode::Temporal;
    if (name == "both") return PpeMode::Both;
    throw ConfigError("unknown ppe mode '" + std::string(name) + "' (expected off, spatial, temporal, both)");
}

std::string to_string(PpeMode mode) {
    switch (mode) {
        case PpeMode::Off: return "off";
        case PpeMode::Spatial: return "spatial";
        case PpeMode::Temporal: return "temporal";
        case PpeMode::Both: return "both";
    }
    return "?";
}

RelationMode parse_relation(std::string_view name) {
    if (name == "none") return RelationMode::None;
    if (name == "rs_only") return RelationMode::RsOnly;
    if (name == "rp_only") return RelationMode::RpOnly;
    if (name == "both") return RelationMode::Both;
    throw ConfigError("unknown relation mode '" + std::string(name) + "' (expected none, rs_only, rp_only, both)");
}

std::string to_string(RelationMode mode) {
    switch (mode) {
        case RelationMode::None: return "none";
        case RelationMode::RsOnly: return "rs_only";
        case RelationMode::RpOnly: return "rp_only";
        case RelationMode::Both: return "both";
    }
    return "?";
}

PanoramicEmbedding make_panoramic_embedding(std::size_t grid_h, std::size_t grid_w, std::size_t frames,
                                            std::size_t d) {
    if (d % 4 != 0) throw ConfigError("panoramic embedding needs d divisible by 4, got " + std::to_string(d));
    if (grid_h == 0 || grid_w == 0 || frames == 0) throw ConfigError("panoramic embedding needs a non-empty grid");
    const std::size_t half = d / 2;
    const Tensor rows = sinusoidal_embedding(grid_h, half);
    const Tensor cols = sinusoidal_embedding(grid_w, half);
    std::vector<double> scene(d * grid_h * grid_w);
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t r = 0; r < grid_h; ++r) {
            for (std::size_t q = 0; q < grid_w; ++q) {
                scene[(c * grid_h + r) * grid_w + q] =
                    c < half ? rows.data()[r * half + c] : cols.data()[q * half + (c - half)];
            }
        }
    }
    PanoramicEmbedding emb;
    emb.grid_h = grid_h;
    emb.grid_w = grid_w;
    emb.frames = frames;
    emb.d = d;
    emb.scene = Tensor::from({d, grid_h, grid_w}, std::move(scene));
    emb.temporal = sinusoidal_embedding(frames, d);
    return emb;
}

Tensor roi_align(const Tensor& scene, const BoxTrack& track, std::size_t out_h, std::size_t out_w) {
    if (scene.rank() != 4) throw ShapeError("roi_align: scene must be [T,d,H,W], got " + to_string(scene.shape()));
    if (out_h == 0 || out_w == 0) throw ConfigError("roi_align: output size must be positive");
    if (scene.dim(0) != track.frames()) {
        throw ShapeError("roi_align: scene has " + std::to_string(scene.dim(0)) + " frames, track has " +
                         std::to_string(track.frames()));
    }
    kernels::RoiAlignArgs args;
    args.frames = track.frames();
    args.channels = scene.dim(1);
    args.height = scene.dim(2);
    args.width = scene.dim(3);
    args.individuals = track.individuals();
    args.out_h = out_h;
    args.out_w = out_w;
    const auto boxes = track.flat();
    std::vector<double> out(args.individuals * args.frames * args.channels * out_h * out_w);
    kernels::roi_align(scene.data().data(), boxes.data(), out.data(), args);
    return Tensor::from({args.individuals, args.frames, args.channels, out_h, out_w}, std::move(out));
}

Tensor to_channels_last(const Tensor& x) {
    if (x.rank() != 5) throw ShapeError("expected [N,T,d,h,w], got " + to_string(x.shape()));
    return permute(x, {0, 1, 3, 4, 2});
}

PanoramicCrop crop_panoramic_embedding(const PanoramicEmbedding& emb, const BoxTrack& track, std::size_t out_h,
                                       std::size_t out_w) {
    if (track.frames() != emb.frames) {
        throw ShapeError("panoramic embedding built for " + std::to_string(emb.frames) + " frames, track has " +
                         std::to_string(track.frames()));
    }
    kernels::RoiAlignArgs args;
    args.frames = track.frames();
    args.channels = emb.d;
    args.height = emb.grid_h;
    args.width = emb.grid_w;
    args.individuals = track.individuals();
    args.out_h = out_h;
    args.out_w = out_w;
    args.shared_grid = true;
    const auto boxes = track.flat();
    std::vector<double> spatial(args.individuals * args.frames * emb.d * out_h * out_w);
    kernels::roi_align(emb.scene.data().data(), boxes.data(), spatial.data(), args);

    PanoramicCrop crop;
    NoGradGuard no_grad;
    crop.spatial = to_channels_last(
        Tensor::from({args.individuals, args.frames, emb.d, out_h, out_w}, std::move(spatial)));
    const std::size_t n = track.individuals(), t = track.frames(), d = emb.d;
    std::vector<double> temporal(n * t * out_h * out_w * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < t; ++f) {
            for (std::size_t cell = 0; cell < out_h * out_w; ++cell) {
                std::copy_n(emb.temporal.data().begin() + static_cast<std::ptrdiff_t>(f * d), d,
                            temporal.begin() + static_cast<std::ptrdiff_t>(((i * t + f) * out_h * out_w + cell) * d));
            }
        }
    }
    crop.temporal = Tensor::from({n, t, out_h, out_w, d}, std::move(temporal));
    return crop;
}

Tensor positional_term(const PanoramicCrop& crop, PpeMode mode) {
    switch (mode) {
        case PpeMode::Off: return {};
        case PpeMode::Spatial: return crop.spatial;
        case PpeMode::Temporal: return crop.temporal;
        case PpeMode::Both: {
            NoGradGuard no_grad;
            return add(crop.spatial, crop.temporal);
        }
    }
    return {};
}

AxialAttentionParams make_axial_attention(ParamStore& store, const std::string& prefix, std::size_t d,
                                          std::size_t heads, Initializer& init) {
    AxialAttentionParams p;
    p.temporal = make_mhsa(store, prefix + ".temporal", d, heads, init);
    p.height = make_mhsa(store, prefix + ".height", d, heads, init);
    p.width = make_mhsa(store, prefix + ".width", d, heads, init);
    return p;
}

namespace {

// Self-attention along one axis of [N, T, h, w, d]; `order` moves that axis to
// position 3 and `inverse` restores the layout.
Tensor attend_along(const Tensor& x, const MhsaParams& params, const std::vector<std::size_t>& order,
                    const std::vector<std::size_t>& inverse) {
    const Tensor moved = permute(x, order);
    const auto& s = moved.shape();
    const Tensor seqs = reshape(moved, {s[0] * s[1] * s[2], s[3], s[4]});
    const Tensor out = reshape(multi_head_self_attention(seqs, params), s);
    return permute(out, inverse);
}

}  // namespace

Tensor axial_attention(const Tensor& x, const Tensor& positional, const AxialAttentionParams& params) {
    if (x.rank() != 5) throw ShapeError("axial_attention: expected [N,T,h,w,d], got " + to_string(x.shape()));
    if (positional.defined() && positional.shape() != x.shape()) {
        throw ShapeError("axial_attention: positional term " + to_string(positional.shape()) +
                         " does not match features " + to_string(x.shape()));
    }
    auto with_pos = [&](const Tensor& t) { return positional.defined() ? add(t, positional) : t; };
    const Tensor a_t = attend_along(with_pos(x), params.temporal, {0, 2, 3, 1, 4}, {0, 3, 1, 2, 4});
    const Tensor a_h = attend_along(with_pos(a_t), params.height, {0, 1, 3, 2, 4}, {0, 1, 3, 2, 4});
    const Tensor a_w = attend_along(with_pos(a_h), params.width, {0, 1, 2, 3, 4}, {0, 1, 2, 3, 4});
    return add(a_w, x);
}

Tensor pool_individuals(const Tensor& x) {
    if (x.rank() != 5) throw ShapeError("pool_individuals: expected [N,T,h,w,d], got " + to_string(x.shape()));
    const auto& s = x.shape();
    return mean(reshape(x, {s[0], s[1] * s[2] * s[3], s[4]}), 1);
}

Tensor similarity_matrix(const Tensor& pooled, const Tensor& w_theta, const Tensor& w_phi) {
    const Tensor logits = matmul(matmul(pooled, w_theta), transpose(matmul(pooled, w_phi)));
    return softmax(logits, 1);
}

Tensor fuse_relations(const Tensor& rs, const Tensor& rp) { return scale(add(rs, rp), 0.5); }

Tensor proximity_tensor(const ProximityMatrix& m) { return Tensor::from({m.size, m.size}, m.values); }

Tensor compose_relation(RelationMode mode, const Tensor& rs, const Tensor& rp) {
    switch (mode) {
        case RelationMode::None: {
            const std::size_t n = rs.dim(0);
            std::vector<double> eye(n * n, 0.0);
            for (std::size_t i = 0; i < n; ++i) eye[i * n + i] = 1.0;
            return Tensor::from({n, n}, std::move(eye));
        }
        case RelationMode::RsOnly: return rs;
        case RelationMode::RpOnly: return rp;
        case RelationMode::Both: return fuse_relations(rs, rp);
    }
    return rs;
}

GroupCountHead make_group_count_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                     Initializer& init) {
    GroupCountHead head;
    head.hidden = make_linear(store, prefix + ".hidden", d, d, init);
    head.output = make_linear(store, prefix + ".output", d, 1, init);
    return head;
}

Tensor group_count_head(const Tensor& relation, const Tensor& pooled, const GroupCountHead& head) {
    const Tensor context = mean(matmul(relation, pooled), 0, /*keepdim=*/true);  // [1, d]
    return reshape(sigmoid(apply(head.output, relu(apply(head.hidden, context)))), {1});
}

std::size_t group_count_from_fraction(double fraction, std::size_t individuals) {
    const double scaled = static_cast<double>(individuals) * fraction;
    const double rounded = std::floor(scaled + 0.5);
    const double clamped = std::clamp(rounded, 1.0, static_cast<double>(individuals));
    return static_cast<std::size_t>(clamped);
}

}  // namespace panoact
