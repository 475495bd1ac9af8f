// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/model.hpp"

#include "panoact/kmeans.hpp"

namespace panoact {

GroupingSource parse_grouping(std::string_view name) {
    if (name == "predicted") return GroupingSource::Predicted;
    if (name == "gt_groups") return GroupingSource::GtGroups;
    if (name == "gt_count") return GroupingSource::GtCount;
    throw ConfigError("unknown grouping source '" + std::string(name) + "' (expected predicted, gt_groups, gt_count)");
}

std::string to_string(GroupingSource source) {
    switch (source) {
        case GroupingSource::Predicted: return "predicted";
        case GroupingSource::GtGroups: return "gt_groups";
        case GroupingSource::GtCount: return "gt_count";
    }
    return "predicted";
}

void ModelConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("model config: " + msg); };
    if (feature_dim == 0 || d == 0) fail("feature_dim and d must be positive");
    if (d % 4 != 0) fail("d must be divisible by 4 for the panoramic embedding");
    if (heads == 0 || d % heads != 0) fail("d must be divisible by heads");
    if (layers == 0) fail("layers must be positive");
    if (frames == 0 || crop_h == 0 || crop_w == 0 || grid_h == 0 || grid_w == 0) fail("frame and grid sizes must be positive");
    if (classes.individual == 0 || classes.social == 0 || classes.global == 0) fail("class counts must be positive");
    if (kmeans_restarts == 0) fail("kmeans_restarts must be positive");
}

nlohmann::json to_json(const ModelConfig& c) {
    return {{"feature_dim", c.feature_dim},
            {"d", c.d},
            {"heads", c.heads},
            {"layers", c.layers},
            {"frames", c.frames},
            {"crop_h", c.crop_h},
            {"crop_w", c.crop_w},
            {"grid_h", c.grid_h},
            {"grid_w", c.grid_w},
            {"individual_classes", c.classes.individual},
            {"social_classes", c.classes.social},
            {"global_classes", c.classes.global},
            {"ppe", to_string(c.ppe)},
            {"proximity", to_string(c.proximity)},
            {"relation", to_string(c.relation)},
            {"structure", to_string(c.structure)},
            {"kmeans_restarts", c.kmeans_restarts},
            {"seed", c.seed}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.feature_dim = j.value("feature_dim", c.feature_dim);
    c.d = j.value("d", c.d);
    c.heads = j.value("heads", c.heads);
    c.layers = j.value("layers", c.layers);
    c.frames = j.value("frames", c.frames);
    c.crop_h = j.value("crop_h", c.crop_h);
    c.crop_w = j.value("crop_w", c.crop_w);
    c.grid_h = j.value("grid_h", c.grid_h);
    c.grid_w = j.value("grid_w", c.grid_w);
    c.classes.individual = j.value("individual_classes", c.classes.individual);
    c.classes.social = j.value("social_classes", c.classes.social);
    c.classes.global = j.value("global_classes", c.classes.global);
    c.ppe = parse_ppe(j.value("ppe", to_string(c.ppe)));
    c.proximity = parse_proximity(j.value("proximity", to_string(c.proximity)));
    c.relation = parse_relation(j.value("relation", to_string(c.relation)));
    c.structure = parse_structure(j.value("structure", to_string(c.structure)));
    c.kmeans_restarts = j.value("kmeans_restarts", c.kmeans_restarts);
    c.seed = j.value("seed", c.seed);
    return c;
}

Model::Model(const ModelConfig& config) : config_(config) {
    config_.validate();
    const std::size_t d = config_.d;
    Initializer init(config_.seed);
    embedding_ = make_panoramic_embedding(config_.grid_h, config_.grid_w, config_.frames, d);
    stem_ = make_linear(store_, "stem", config_.feature_dim, d, init);
    axial_ = make_axial_attention(store_, "axial", d, config_.heads, init);
    w_theta_ = store_.add("relation.theta", init.glorot(d, d));
    w_phi_ = store_.add("relation.phi", init.glorot(d, d));
    count_head_ = make_group_count_head(store_, "count", d, init);
    aux_head_ = make_linear(store_, "aux", d, config_.classes.individual, init);
    tokens_ = make_token_bank(store_, "tokens", d, init);
    if (config_.structure == Structure::Dpatr) {
        for (std::size_t l = 0; l < config_.layers; ++l) {
            layers_.push_back(make_dpatr_layer(store_, "dpatr." + std::to_string(l), d, config_.heads, init));
        }
    } else {
        alt_ = make_alt_structure(store_, "alt", d, config_.heads, init);
    }
    heads_ = make_activity_heads(store_, "heads", d, config_.classes.individual, config_.classes.social,
                                 config_.classes.global, init);
}

void Model::check_sample(const SceneSample& s) const {
    auto mismatch = [&](const std::string& what, std::size_t have, std::size_t want) {
        if (have != want) {
            throw DataError("scene seed " + std::to_string(s.seed) + ": " + what + " is " + std::to_string(have) +
                            ", model expects " + std::to_string(want));
        }
    };
    mismatch("feature_dim", s.feature_dim, config_.feature_dim);
    mismatch("frames", s.frames, config_.frames);
    mismatch("crop_h", s.crop_h, config_.crop_h);
    mismatch("crop_w", s.crop_w, config_.crop_w);
    mismatch("individual classes", s.classes.individual, config_.classes.individual);
    mismatch("social classes", s.classes.social, config_.classes.social);
    mismatch("global classes", s.classes.global, config_.classes.global);
    if (s.individuals() == 0) throw DataError("scene seed " + std::to_string(s.seed) + " has no individuals");
}

Encoded Model::encode(const SceneSample& s) const {
    check_sample(s);
    const Tensor crops = to_channels_last(s.crops());
    const Tensor x = apply(stem_, crops);
    Tensor positional;
    if (config_.ppe != PpeMode::Off) {
        positional = positional_term(crop_panoramic_embedding(embedding_, s.track, config_.crop_h, config_.crop_w),
                                     config_.ppe);
    }
    Encoded e;
    e.pooled = pool_individuals(axial_attention(x, positional, axial_));
    e.rs = similarity_matrix(e.pooled, w_theta_, w_phi_);
    e.rp = proximity_tensor(proximity_matrix(s.track, config_.proximity));
    e.relation = compose_relation(config_.relation, e.rs, e.rp);
    e.count_fraction = group_count_head(e.relation, e.pooled, count_head_);
    e.aux = sigmoid(apply(aux_head_, e.pooled));
    return e;
}

GroupAssignment cluster_rows(const Tensor& points, std::size_t k, std::uint64_t seed, std::size_t restarts) {
    if (points.rank() != 2) throw ShapeError("cluster_rows: points must be [N,d], got " + to_string(points.shape()));
    const PointSet set{points.data(), points.dim(0), points.dim(1)};
    return kmeans_best_of(set, k, seed, restarts).groups;
}

GroupAssignment Model::group(const Encoded& e, const SceneSample& s, GroupingSource source) const {
    if (source == GroupingSource::GtGroups) return s.groups;
    NoGradGuard no_grad;
    const Tensor points = matmul(e.relation, e.pooled);
    const std::size_t k = source == GroupingSource::GtCount
                              ? s.groups.count
                              : group_count_from_fraction(e.count_fraction.item(), s.individuals());
    return cluster_rows(points, k, config_.seed, config_.kmeans_restarts);
}

ActivityScores Model::recognize(const Tensor& pooled, const GroupAssignment& groups) const {
    const ActivityFeatures f = config_.structure == Structure::Dpatr
                                   ? dpatr_forward(pooled, groups, layers_, tokens_)
                                   : alt_structure_forward(config_.structure, pooled, groups, alt_, tokens_);
    return classify(f, heads_);
}

Recognition Model::forward(const SceneSample& s, GroupingSource source) const {
    Recognition r;
    r.encoded = encode(s);
    r.groups = group(r.encoded, s, source);
    r.scores = recognize(r.encoded.pooled, r.groups);
    return r;
}

Checkpoint Model::to_checkpoint() const {
    Checkpoint ckpt;
    ckpt.meta["model"] = to_json(config_);
    for (const auto& [name, t] : store_.items()) ckpt.tensors.emplace_back(name, t.detach().clone());
    return ckpt;
}

void Model::load(const Checkpoint& ckpt) {
    for (auto& [name, t] : store_.items()) {
        const Tensor& src = ckpt.find(name);
        if (src.shape() != t.shape()) {
            throw DataError("checkpoint tensor '" + name + "' has shape " + to_string(src.shape()) +
                            ", model expects " + to_string(t.shape()));
        }
        const auto from = src.data();
        auto to = t.mutable_data();
        std::copy(from.begin(), from.end(), to.begin());
    }
}

Model Model::from_checkpoint(const Checkpoint& ckpt) {
    if (!ckpt.meta.contains("model")) throw DataError("checkpoint has no model config");
    Model m(model_config_from_json(ckpt.meta.at("model")));
    m.load(ckpt);
    return m;
}

}  // namespace panoact
