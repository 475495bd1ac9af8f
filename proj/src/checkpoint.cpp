// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "panoact/byteio.hpp"

namespace panoact {

const Tensor& Checkpoint::find(const std::string& name) const {
    for (const auto& [n, t] : tensors) {
        if (n == name) return t;
    }
    throw DataError("checkpoint has no tensor named '" + name + "'");
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    nlohmann::json manifest;
    manifest["format"] = "panoact-checkpoint";
    manifest["version"] = 1;
    manifest["dtype"] = "float64-le";
    manifest["meta"] = ckpt.meta;
    auto entries = nlohmann::json::array();
    std::vector<std::string> encoded;
    std::uint64_t offset = 0;
    for (const auto& [name, t] : ckpt.tensors) {
        encoded.push_back(byteio::encode_le_f64(t.data()));
        const std::string& bytes = encoded.back();
        entries.push_back({{"name", name},
                           {"shape", t.shape()},
                           {"dtype", "float64"},
                           {"offset", offset},
                           {"fnv1a64", byteio::fnv1a64(bytes.data(), bytes.size())}});
        offset += bytes.size();
    }
    manifest["tensors"] = entries;
    manifest["blob_bytes"] = offset;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path.string());
    out << manifest.dump() << '\n';
    for (const auto& bytes : encoded) out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw DataError(path.string() + ": missing manifest line");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(header);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": malformed manifest at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (manifest.value("format", "") != "panoact-checkpoint") {
        throw DataError(path.string() + ": not a checkpoint manifest");
    }
    try {
        const std::uint64_t blob_start = header.size() + 1;
        std::vector<char> blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const std::uint64_t declared = manifest.at("blob_bytes").get<std::uint64_t>();
        if (blob.size() != declared) {
            throw DataError(path.string() + ": blob holds " + std::to_string(blob.size()) + " bytes, manifest declares " +
                            std::to_string(declared) + " (blob starts at file offset " + std::to_string(blob_start) + ")");
        }

        Checkpoint ckpt;
        ckpt.meta = manifest.value("meta", nlohmann::json::object());
        for (const auto& e : manifest.at("tensors")) {
            const auto name = e.at("name").get<std::string>();
            const auto shape = e.at("shape").get<Shape>();
            const auto offset = e.at("offset").get<std::uint64_t>();
            const std::uint64_t bytes = numel(shape) * sizeof(double);
            if (offset + bytes > blob.size()) {
                throw DataError(path.string() + ": tensor '" + name + "' spans bytes [" + std::to_string(offset) + ", " +
                                std::to_string(offset + bytes) + ") beyond blob length " + std::to_string(blob.size()));
            }
            if (e.contains("fnv1a64") &&
                e.at("fnv1a64").get<std::uint64_t>() != byteio::fnv1a64(blob.data() + offset, bytes)) {
                throw DataError(path.string() + ": tensor '" + name + "' bytes [" + std::to_string(offset) + ", " +
                                std::to_string(offset + bytes) + ") fail their checksum (file offset " +
                                std::to_string(blob_start + offset) + ")");
            }
            std::vector<double> values(numel(shape));
            byteio::read_le_f64(blob.data() + offset, values);
            ckpt.tensors.emplace_back(name, Tensor::from(shape, std::move(values)));
        }
        return ckpt;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": bad manifest entry: " + e.what());
    }
}

}  // namespace panoact
