// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/dpatr.hpp"

namespace panoact {

Structure parse_structure(std::string_view name) {
    if (name == "dpatr") return Structure::Dpatr;
    if (name == "parallel") return Structure::Parallel;
    if (name == "hierarchical") return Structure::Hierarchical;
    if (name == "reverse") return Structure::Reverse;
    throw ConfigError("unknown structure '" + std::string(name) +
                      "' (expected dpatr, parallel, hierarchical, reverse)");
}

std::string to_string(Structure s) {
    switch (s) {
        case Structure::Dpatr: return "dpatr";
        case Structure::Parallel: return "parallel";
        case Structure::Hierarchical: return "hierarchical";
        case Structure::Reverse: return "reverse";
    }
    return "?";
}

DpatrLayerParams make_dpatr_layer(ParamStore& store, const std::string& prefix, std::size_t d, std::size_t heads,
                                  Initializer& init) {
    DpatrLayerParams p;
    p.global_path = make_encoder_block(store, prefix + ".global_path", d, heads, init);
    p.social_path = make_encoder_block(store, prefix + ".social_path", d, heads, init);
    return p;
}

TokenBank make_token_bank(ParamStore& store, const std::string& prefix, std::size_t d, Initializer& init) {
    TokenBank bank;
    bank.global_token = store.add(prefix + ".global", init.normal({1, d}, 0.02));
    bank.social_token = store.add(prefix + ".social", init.normal({1, d}, 0.02));
    return bank;
}

namespace {

Tensor replicate_rows(const Tensor& row, std::size_t count) {
    return index_rows(row, std::vector<std::size_t>(count, 0));
}

// Runs block on [token; rows] and splits the result back.
std::pair<Tensor, Tensor> prefixed_block(const Tensor& token, const Tensor& rows, const EncoderBlockParams& block) {
    const Tensor out = encoder_block(concat({token, rows}, 0), block);
    const std::size_t tokens = token.dim(0);
    return {slice(out, 0, 0, tokens), slice(out, 0, tokens, rows.dim(0))};
}

}  // namespace

std::pair<Tensor, Tensor> social_pass(const Tensor& social, const Tensor& individuals, const GroupAssignment& groups,
                                      const EncoderBlockParams& block) {
    if (groups.individuals() != individuals.dim(0)) {
        throw ShapeError("grouping covers " + std::to_string(groups.individuals()) + " individuals, features have " +
                         std::to_string(individuals.dim(0)));
    }
    if (social.dim(0) != groups.count) {
        throw ShapeError("need one social token per group: " + std::to_string(groups.count) + " groups, " +
                         std::to_string(social.dim(0)) + " tokens");
    }
    const auto members = groups.members();
    std::vector<Tensor> tokens_out, members_out;
    std::vector<std::size_t> position(individuals.dim(0));
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (members[k].empty()) throw std::logic_error("social_pass: group " + std::to_string(k) + " is empty");
        auto [tok, rows] = prefixed_block(slice(social, 0, k, 1), index_rows(individuals, members[k]), block);
        tokens_out.push_back(tok);
        members_out.push_back(rows);
        for (auto i : members[k]) position[i] = cursor++;
    }
    return {concat(tokens_out, 0), index_rows(concat(members_out, 0), position)};
}

ActivityFeatures dpatr_layer(const ActivityFeatures& in, const GroupAssignment& groups, const DpatrLayerParams& p) {
    auto [global, mid] = prefixed_block(in.global, in.individuals, p.global_path);
    auto [social, individuals] = social_pass(in.social, mid, groups, p.social_path);
    return {individuals, global, social};
}

ActivityFeatures dpatr_forward(const Tensor& pooled, const GroupAssignment& groups,
                               const std::vector<DpatrLayerParams>& layers, const TokenBank& tokens) {
    if (layers.empty()) throw ConfigError("transformer needs at least one layer");
    ActivityFeatures f{pooled, tokens.global_token, replicate_rows(tokens.social_token, groups.count)};
    for (const auto& layer : layers) f = dpatr_layer(f, groups, layer);
    return f;
}

AltStructureParams make_alt_structure(ParamStore& store, const std::string& prefix, std::size_t d,
                                      std::size_t heads, Initializer& init) {
    AltStructureParams p;
    p.individual = make_encoder_block(store, prefix + ".individual", d, heads, init);
    p.social = make_encoder_block(store, prefix + ".social", d, heads, init);
    p.global = make_encoder_block(store, prefix + ".global", d, heads, init);
    return p;
}

ActivityFeatures alt_structure_forward(Structure variant, const Tensor& pooled, const GroupAssignment& groups,
                                       const AltStructureParams& p, const TokenBank& tokens) {
    const Tensor social_tokens = replicate_rows(tokens.social_token, groups.count);
    switch (variant) {
        case Structure::Parallel: {
            const Tensor individuals = encoder_block(pooled, p.individual);
            const Tensor social = social_pass(social_tokens, pooled, groups, p.social).first;
            const Tensor global = prefixed_block(tokens.global_token, pooled, p.global).first;
            return {individuals, global, social};
        }
        case Structure::Hierarchical: {
            const Tensor individuals = encoder_block(pooled, p.individual);
            const Tensor social = social_pass(social_tokens, individuals, groups, p.social).first;
            const Tensor global =
                prefixed_block(tokens.global_token, concat({social, individuals}, 0), p.global).first;
            return {individuals, global, social};
        }
        case Structure::Reverse: {
            auto [global, scene_individuals] = prefixed_block(tokens.global_token, pooled, p.global);
            auto [social, group_individuals] = social_pass(social_tokens, scene_individuals, groups, p.social);
            return {encoder_block(group_individuals, p.individual), global, social};
        }
        case Structure::Dpatr: break;
    }
    throw ConfigError("alt_structure_forward: '" + to_string(variant) + "' is not a comparison structure");
}

ActivityHeads make_activity_heads(ParamStore& store, const std::string& prefix, std::size_t d,
                                  std::size_t individual_classes, std::size_t social_classes,
                                  std::size_t global_classes, Initializer& init) {
    ActivityHeads h;
    h.individual = make_linear(store, prefix + ".individual", d, individual_classes, init);
    h.social = make_linear(store, prefix + ".social", d, social_classes, init);
    h.global = make_linear(store, prefix + ".global", d, global_classes, init);
    return h;
}

ActivityScores classify(const ActivityFeatures& f, const ActivityHeads& heads) {
    return {sigmoid(apply(heads.individual, f.individuals)), sigmoid(apply(heads.social, f.social)),
            sigmoid(apply(heads.global, f.global))};
}

std::vector<std::size_t> positive_classes(std::span<const double> scores) {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < scores.size(); ++c) {
        if (scores[c] > 0.5) out.push_back(c);
    }
    return out;
}

}  // namespace panoact
