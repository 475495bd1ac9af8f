// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/dataset.hpp"

#include <fstream>
#include <iterator>

#include "panoact/byteio.hpp"

namespace panoact {

namespace {

using nlohmann::json;

json record_of(const SceneSample& s, std::size_t index, std::uint64_t offset, std::uint64_t checksum) {
    json boxes = json::array();
    for (const Box& b : s.track.boxes()) boxes.push_back({b.x1, b.y1, b.x2, b.y2});
    json distractor = json::array();
    for (bool d : s.distractor) distractor.push_back(d);
    return {{"index", index},
            {"seed", s.seed},
            {"flavor", to_string(s.flavor)},
            {"individuals", s.individuals()},
            {"frames", s.frames},
            {"feature_dim", s.feature_dim},
            {"grid", {s.grid_h, s.grid_w}},
            {"crop", {s.crop_h, s.crop_w}},
            {"classes", {s.classes.individual, s.classes.social, s.classes.global}},
            {"shape", s.feature_shape()},
            {"offset", offset},
            {"fnv1a64", checksum},
            {"boxes", boxes},
            {"groups", s.groups.labels},
            {"group_count", s.groups.count},
            {"individual_labels", s.individual_labels},
            {"group_labels", s.group_labels},
            {"global_labels", s.global_labels},
            {"group_archetypes", s.group_archetypes},
            {"distractor", distractor}};
}

SceneSample sample_of(const json& r) {
    SceneSample s;
    s.seed = r.at("seed").get<std::uint64_t>();
    s.flavor = parse_flavor(r.at("flavor").get<std::string>());
    s.frames = r.at("frames").get<std::size_t>();
    s.feature_dim = r.at("feature_dim").get<std::size_t>();
    s.grid_h = r.at("grid").at(0).get<std::size_t>();
    s.grid_w = r.at("grid").at(1).get<std::size_t>();
    s.crop_h = r.at("crop").at(0).get<std::size_t>();
    s.crop_w = r.at("crop").at(1).get<std::size_t>();
    s.classes = {r.at("classes").at(0).get<std::size_t>(), r.at("classes").at(1).get<std::size_t>(),
                 r.at("classes").at(2).get<std::size_t>()};
    const auto n = r.at("individuals").get<std::size_t>();
    std::vector<Box> boxes;
    for (const auto& b : r.at("boxes")) {
        boxes.push_back({b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()});
    }
    if (boxes.size() != n * s.frames) throw DataError("box count does not match individuals x frames");
    s.track = BoxTrack(n, s.frames, std::move(boxes));
    s.track.validate();
    s.groups.labels = r.at("groups").get<std::vector<std::size_t>>();
    s.groups.count = r.at("group_count").get<std::size_t>();
    if (s.groups.individuals() != n) throw DataError("group labels do not match individual count");
    s.groups.validate();
    s.individual_labels = r.at("individual_labels").get<std::vector<std::vector<std::size_t>>>();
    s.group_labels = r.at("group_labels").get<std::vector<std::vector<std::size_t>>>();
    s.global_labels = r.at("global_labels").get<std::vector<std::size_t>>();
    s.group_archetypes = r.at("group_archetypes").get<std::vector<std::size_t>>();
    s.distractor = r.at("distractor").get<std::vector<bool>>();
    if (s.individual_labels.size() != n || s.distractor.size() != n) {
        throw DataError("per-individual fields do not match individual count");
    }
    if (s.group_labels.size() != s.groups.count || s.group_archetypes.size() != s.groups.count) {
        throw DataError("per-group fields do not match group count");
    }
    auto check = [](const std::vector<std::size_t>& v, std::size_t classes, const char* what) {
        for (std::size_t c : v) {
            if (c >= classes) throw DataError(std::string(what) + " label " + std::to_string(c) + " out of range");
        }
    };
    for (const auto& v : s.individual_labels) check(v, s.classes.individual, "individual");
    for (const auto& v : s.group_labels) check(v, s.classes.social, "social");
    check(s.global_labels, s.classes.global, "global");
    if (r.at("shape").get<Shape>() != s.feature_shape()) throw DataError("feature shape does not match header fields");
    return s;
}

}  // namespace

std::filesystem::path blob_path_for(const std::filesystem::path& manifest_path) {
    auto p = manifest_path;
    p.replace_extension(".bin");
    return p;
}

void write_dataset(const std::vector<SceneSample>& samples, const std::filesystem::path& path, const json& spec) {
    const auto blob_path = blob_path_for(path);
    if (blob_path == path) throw ConfigError("dataset path must not end in .bin: " + path.string());
    std::ofstream meta(path, std::ios::trunc);
    if (!meta) throw DataError("cannot open dataset for writing: " + path.string());
    std::ofstream blob(blob_path, std::ios::binary | std::ios::trunc);
    if (!blob) throw DataError("cannot open dataset blob for writing: " + blob_path.string());

    std::uint64_t total = 0;
    for (const auto& s : samples) total += s.features.size() * sizeof(float);
    meta << json{{"format", "panoact-dataset"},
                 {"version", 1},
                 {"dtype", "float32-le"},
                 {"blob", blob_path.filename().string()},
                 {"count", samples.size()},
                 {"blob_bytes", total},
                 {"spec", spec}}
                .dump()
         << '\n';
    std::uint64_t offset = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string bytes = byteio::encode_le_f32(samples[i].features);
        meta << record_of(samples[i], i, offset, byteio::fnv1a64(bytes.data(), bytes.size())).dump() << '\n';
        blob.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        offset += bytes.size();
    }
    if (!meta || !blob) throw DataError("write failed: " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream meta(path);
    if (!meta) throw DataError("cannot open dataset: " + path.string());
    const auto where = [&](std::size_t line) { return path.string() + ":" + std::to_string(line) + ": "; };

    Dataset ds;
    std::string line;
    if (!std::getline(meta, line)) throw DataError(where(1) + "missing manifest line");
    try {
        ds.manifest = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(where(1) + "malformed manifest at byte " + std::to_string(e.byte));
    }
    if (ds.manifest.value("format", "") != "panoact-dataset") throw DataError(where(1) + "not a dataset manifest");

    const auto blob_path = path.parent_path() / ds.manifest.value("blob", blob_path_for(path).filename().string());
    std::ifstream blob_in(blob_path, std::ios::binary);
    if (!blob_in) throw DataError("cannot open dataset blob: " + blob_path.string());
    const std::vector<char> blob((std::istreambuf_iterator<char>(blob_in)), std::istreambuf_iterator<char>());

    const auto count = ds.manifest.value("count", std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t line_no = i + 2;
        if (!std::getline(meta, line)) {
            throw DataError(where(line_no) + "sample " + std::to_string(i) + " record missing (manifest declares " +
                            std::to_string(count) + ")");
        }
        json r;
        try {
            r = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(where(line_no) + "sample " + std::to_string(i) + ": malformed record at byte " +
                            std::to_string(e.byte));
        }
        SceneSample s;
        std::uint64_t offset = 0, checksum = 0;
        try {
            s = sample_of(r);
            offset = r.at("offset").get<std::uint64_t>();
            checksum = r.at("fnv1a64").get<std::uint64_t>();
        } catch (const json::exception& e) {
            throw DataError(where(line_no) + "sample " + std::to_string(i) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(where(line_no) + "sample " + std::to_string(i) + ": " + e.what());
        } catch (const ConfigError& e) {
            throw DataError(where(line_no) + "sample " + std::to_string(i) + ": " + e.what());
        }
        const std::uint64_t bytes = numel(s.feature_shape()) * sizeof(float);
        if (offset + bytes > blob.size()) {
            throw DataError("sample " + std::to_string(i) + ": feature bytes [" + std::to_string(offset) + ", " +
                            std::to_string(offset + bytes) + ") exceed blob length " + std::to_string(blob.size()) +
                            " of " + blob_path.string());
        }
        if (byteio::fnv1a64(blob.data() + offset, bytes) != checksum) {
            throw DataError("sample " + std::to_string(i) + ": feature bytes [" + std::to_string(offset) + ", " +
                            std::to_string(offset + bytes) + ") of " + blob_path.string() + " fail their checksum");
        }
        s.features.resize(bytes / sizeof(float));
        byteio::read_le_f32(blob.data() + offset, s.features);
        ds.samples.push_back(std::move(s));
    }
    if (std::getline(meta, line) && !line.empty()) {
        throw DataError(where(count + 2) + "unexpected record beyond declared count " + std::to_string(count));
    }
    return ds;
}

json to_json(const DatasetConfig& c) {
    const SceneSpec& b = c.base;
    return {{"scenes", c.scenes},
            {"seed", c.seed},
            {"min_individuals", c.min_individuals},
            {"max_individuals", c.max_individuals},
            {"max_group_size", c.max_group_size},
            {"distractor_rate", c.distractor_rate},
            {"frames", b.frames},
            {"grid_h", b.grid_h},
            {"grid_w", b.grid_w},
            {"feature_dim", b.feature_dim},
            {"noise", b.noise},
            {"crop_h", b.crop_h},
            {"crop_w", b.crop_w},
            {"flavor", to_string(b.flavor)},
            {"individual_classes", b.classes.individual},
            {"social_classes", b.classes.social},
            {"global_classes", b.classes.global},
            {"prototype_seed", b.prototype_seed}};
}

DatasetConfig dataset_config_from_json(const json& j) {
    DatasetConfig c;
    SceneSpec& b = c.base;
    c.scenes = j.value("scenes", c.scenes);
    c.seed = j.value("seed", c.seed);
    c.min_individuals = j.value("min_individuals", c.min_individuals);
    c.max_individuals = j.value("max_individuals", c.max_individuals);
    c.max_group_size = j.value("max_group_size", c.max_group_size);
    c.distractor_rate = j.value("distractor_rate", c.distractor_rate);
    b.frames = j.value("frames", b.frames);
    b.grid_h = j.value("grid_h", b.grid_h);
    b.grid_w = j.value("grid_w", b.grid_w);
    b.feature_dim = j.value("feature_dim", b.feature_dim);
    b.noise = j.value("noise", b.noise);
    b.crop_h = j.value("crop_h", b.crop_h);
    b.crop_w = j.value("crop_w", b.crop_w);
    b.flavor = parse_flavor(j.value("flavor", to_string(b.flavor)));
    b.classes.individual = j.value("individual_classes", b.classes.individual);
    b.classes.social = j.value("social_classes", b.classes.social);
    b.classes.global = j.value("global_classes", b.classes.global);
    b.prototype_seed = j.value("prototype_seed", b.prototype_seed);
    return c;
}

}  // namespace panoact
