// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-individual encoding and social relation estimation: RoI cropping,
// scene-anchored positional embedding, axial self-attention, the visual
// similarity matrix, fusion with geometric proximity, and the group-count head.
//
// Inside the model, individual features are channels-last [N, T, h, w, d].
#pragma once

#include <string>
#include <string_view>

#include "panoact/geometry.hpp"
#include "panoact/nn.hpp"

namespace panoact {

enum class PpeMode { Off, Spatial, Temporal, Both };
enum class RelationMode { None, RsOnly, RpOnly, Both };

PpeMode parse_ppe(std::string_view name);
std::string to_string(PpeMode mode);
RelationMode parse_relation(std::string_view name);
std::string to_string(RelationMode mode);

/// Fixed sinusoidal tables. The scene grid splits channels in half: the first
/// d/2 encode the row index, the last d/2 the column index.
struct PanoramicEmbedding {
    std::size_t grid_h = 0, grid_w = 0, frames = 0, d = 0;
    Tensor scene;     // [d, grid_h, grid_w] channels-first, like a frame feature
    Tensor temporal;  // [frames, d]
};

PanoramicEmbedding make_panoramic_embedding(std::size_t grid_h, std::size_t grid_w, std::size_t frames,
                                            std::size_t d);

/// scene: [T, d, H, W]. Returns [N, T, d, out_h, out_w]. Constant w.r.t. autodiff.
Tensor roi_align(const Tensor& scene, const BoxTrack& track, std::size_t out_h, std::size_t out_w);

/// [N, T, d, h, w] -> [N, T, h, w, d]
Tensor to_channels_last(const Tensor& x);

struct PanoramicCrop {
    Tensor spatial;   // [N, T, h, w, d]
    Tensor temporal;  // [N, T, h, w, d], temporal table row per frame
};

PanoramicCrop crop_panoramic_embedding(const PanoramicEmbedding& emb, const BoxTrack& track, std::size_t out_h,
                                       std::size_t out_w);
/// Sum of the crop terms enabled by mode, or an undefined tensor for Off.
Tensor positional_term(const PanoramicCrop& crop, PpeMode mode);

struct AxialAttentionParams {
    MhsaParams temporal, height, width;
};

AxialAttentionParams make_axial_attention(ParamStore& store, const std::string& prefix, std::size_t d,
                                          std::size_t heads, Initializer& init);

/// A_w(A_h(A_t(F + e) + e) + e) + F over x [N, T, h, w, d]; e may be
/// undefined. Each pass attends along one axis; individuals never mix.
Tensor axial_attention(const Tensor& x, const Tensor& positional, const AxialAttentionParams& params);

/// Mean over (T, h, w): [N, T, h, w, d] -> [N, d].
Tensor pool_individuals(const Tensor& x);

/// Row softmax of (F W_theta)(F W_phi)^T, F pooled [N, d].
Tensor similarity_matrix(const Tensor& pooled, const Tensor& w_theta, const Tensor& w_phi);

/// (Rs + Rp) / 2.
Tensor fuse_relations(const Tensor& rs, const Tensor& rp);

Tensor proximity_tensor(const ProximityMatrix& m);

/// R as selected by the relation ablation; None is the identity.
Tensor compose_relation(RelationMode mode, const Tensor& rs, const Tensor& rp);

struct GroupCountHead {
    Linear hidden;  // d -> d
    Linear output;  // d -> 1
};

GroupCountHead make_group_count_head(ParamStore& store, const std::string& prefix, std::size_t d,
                                     Initializer& init);

/// sigmoid(MLP(mean_i (R F)_i)), shape [1].
Tensor group_count_head(const Tensor& relation, const Tensor& pooled, const GroupCountHead& head);

/// clamp(round_half_up(N * fraction), 1, N).
std::size_t group_count_from_fraction(double fraction, std::size_t individuals);

}  // namespace panoact
