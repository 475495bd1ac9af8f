// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/config.hpp"

#include <fstream>
#include <set>

namespace panoact {

namespace {

using nlohmann::json;

void merge_into(json& dst, const json& src) {
    for (const auto& [key, value] : src.items()) {
        if (value.is_object() && dst.contains(key) && dst[key].is_object()) {
            merge_into(dst[key], value);
        } else {
            dst[key] = value;
        }
    }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw ConfigError("config section '" + where + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
    }
}

json data_json(const RunConfig& c) {
    json j = to_json(c.data);
    j.erase("seed");
    j.erase("scenes");
    j["train_scenes"] = c.data.scenes;
    j["val_scenes"] = c.val_scenes;
    return j;
}

json model_json(const ModelConfig& m) {
    return {{"d", m.d},
            {"heads", m.heads},
            {"layers", m.layers},
            {"ppe", to_string(m.ppe)},
            {"proximity", to_string(m.proximity)},
            {"relation", to_string(m.relation)},
            {"structure", to_string(m.structure)},
            {"kmeans_restarts", m.kmeans_restarts}};
}

json train_json(const TrainConfig& t) {
    json j = to_json(t);
    j.erase("seed");
    return j;
}

std::set<std::string> keys_of(const json& j) {
    std::set<std::string> out;
    for (const auto& [k, v] : j.items()) out.insert(k);
    return out;
}

}  // namespace

RunConfig::RunConfig() {
    train.epochs = 30;
    train.warmup_epochs = 2;
    train.lr = 1e-3;
    resolve();
}

void RunConfig::resolve() {
    data.seed = seed;
    model.seed = seed;
    train.seed = seed;
    const SceneSpec& b = data.base;
    model.feature_dim = b.feature_dim;
    model.frames = b.frames;
    model.crop_h = b.crop_h;
    model.crop_w = b.crop_w;
    model.grid_h = b.grid_h;
    model.grid_w = b.grid_w;
    model.classes = b.classes;
    model.validate();
    train.validate();
    loss.validate();
    if (data.scenes == 0) throw ConfigError("data.train_scenes must be positive");
    if (data.min_individuals == 0 || data.min_individuals > data.max_individuals) {
        throw ConfigError("data: need 1 <= min_individuals <= max_individuals");
    }
}

json expand_dotted(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    json out = json::object();
    for (const auto& [key, value] : j.items()) {
        json v = value.is_object() ? expand_dotted(value) : value;
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
            merge_into(out, json{{key, v}});
        } else {
            json nested = expand_dotted(json{{key.substr(dot + 1), v}});
            merge_into(out, json{{key.substr(0, dot), nested}});
        }
    }
    return out;
}

json to_json(const RunConfig& c) {
    return {{"seed", c.seed},
            {"data_dir", c.data_dir.string()},
            {"out", c.out.string()},
            {"grouping", to_string(c.grouping)},
            {"data", data_json(c)},
            {"model", model_json(c.model)},
            {"train", train_json(c.train)},
            {"loss", to_json(c.loss)}};
}

RunConfig run_config_from_json(const json& raw, RunConfig base) {
    const json j = expand_dotted(raw);
    const json defaults = to_json(base);
    reject_unknown(j, keys_of(defaults), "");
    try {
        base.seed = j.value("seed", base.seed);
        base.data_dir = j.value("data_dir", base.data_dir.string());
        base.out = j.value("out", base.out.string());
        base.grouping = parse_grouping(j.value("grouping", to_string(base.grouping)));
        if (j.contains("data")) {
            reject_unknown(j["data"], keys_of(defaults["data"]), "data");
            json d = data_json(base);
            merge_into(d, j["data"]);
            base.data = dataset_config_from_json(d);
            base.data.scenes = d.at("train_scenes").get<std::size_t>();
            base.val_scenes = d.at("val_scenes").get<std::size_t>();
        }
        if (j.contains("model")) {
            reject_unknown(j["model"], keys_of(defaults["model"]), "model");
            base.model = model_config_from_json([&] {
                json m = to_json(base.model);
                merge_into(m, j["model"]);
                return m;
            }());
        }
        if (j.contains("train")) {
            reject_unknown(j["train"], keys_of(defaults["train"]), "train");
            json t = to_json(base.train);
            merge_into(t, j["train"]);
            base.train = train_config_from_json(t);
        }
        if (j.contains("loss")) {
            reject_unknown(j["loss"], keys_of(defaults["loss"]), "loss");
            json l = to_json(base.loss);
            merge_into(l, j["loss"]);
            base.loss = loss_weights_from_json(l);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
    base.resolve();
    return base;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": malformed JSON at byte " + std::to_string(e.byte));
    }
    return run_config_from_json(j);
}

}  // namespace panoact
