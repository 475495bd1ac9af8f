// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dual-path activity transformer over pooled individual features, the three
// granularity classifiers, and the parallel / hierarchical / reverse
// hierarchical comparison structures.
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "panoact/kmeans.hpp"
#include "panoact/nn.hpp"

namespace panoact {

enum class Structure { Dpatr, Parallel, Hierarchical, Reverse };

Structure parse_structure(std::string_view name);
std::string to_string(Structure s);

struct DpatrLayerParams {
    EncoderBlockParams global_path;  // [global token; individuals]
    EncoderBlockParams social_path;  // [social token; group members], per group
};

DpatrLayerParams make_dpatr_layer(ParamStore& store, const std::string& prefix, std::size_t d, std::size_t heads,
                                  Initializer& init);

/// One shared social prototype; it is replicated once per group.
struct TokenBank {
    Tensor global_token;  // [1, d]
    Tensor social_token;  // [1, d]
};

TokenBank make_token_bank(ParamStore& store, const std::string& prefix, std::size_t d, Initializer& init);

/// Features flowing through the transformer.
struct ActivityFeatures {
    Tensor individuals;  // [N, d]
    Tensor global;       // [1, d]
    Tensor social;       // [G, d]
};

/// Runs `block` on [social_k; members of group k] for every group; members
/// never attend across groups. Returns updated social tokens and individuals
/// (in original order).
std::pair<Tensor, Tensor> social_pass(const Tensor& social, const Tensor& individuals, const GroupAssignment& groups,
                                      const EncoderBlockParams& block);

ActivityFeatures dpatr_layer(const ActivityFeatures& in, const GroupAssignment& groups, const DpatrLayerParams& p);

/// Tokens from the bank, threaded through every layer. Individuals entering
/// layer l+1 are the social-path outputs of layer l.
ActivityFeatures dpatr_forward(const Tensor& pooled, const GroupAssignment& groups,
                               const std::vector<DpatrLayerParams>& layers, const TokenBank& tokens);

struct AltStructureParams {
    EncoderBlockParams individual, social, global;
};

AltStructureParams make_alt_structure(ParamStore& store, const std::string& prefix, std::size_t d,
                                      std::size_t heads, Initializer& init);

/// Three single-purpose blocks. parallel: all read the pooled features;
/// hierarchical: individual -> social -> global; reverse: global -> social ->
/// individual. Structure::Dpatr is rejected here.
ActivityFeatures alt_structure_forward(Structure variant, const Tensor& pooled, const GroupAssignment& groups,
                                       const AltStructureParams& p, const TokenBank& tokens);

struct ActivityHeads {
    Linear individual, social, global;
};

ActivityHeads make_activity_heads(ParamStore& store, const std::string& prefix, std::size_t d,
                                  std::size_t individual_classes, std::size_t social_classes,
                                  std::size_t global_classes, Initializer& init);

struct ActivityScores {
    Tensor individual;  // [N, C_idv]
    Tensor social;      // [G, C_sg]
    Tensor global;      // [1, C_glb]
};

ActivityScores classify(const ActivityFeatures& features, const ActivityHeads& heads);

/// Indices with score strictly above 0.5.
std::vector<std::size_t> positive_classes(std::span<const double> scores);

}  // namespace panoact
