// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include <doctest.h>

#include <fstream>
#include <iterator>

#include "panoact/checkpoint.hpp"
#include "support.hpp"

using namespace panoact;
using testing::Gen;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << s;
}

std::string error_of(const std::filesystem::path& p) {
    try {
        (void)read_checkpoint(p);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

Checkpoint sample_checkpoint() {
    Gen g(1);
    Checkpoint c;
    c.meta = {{"note", "x"}, {"steps", 3}};
    c.tensors.emplace_back("a.weight", g.tensor({3, 4}, -1e3, 1e3));
    c.tensors.emplace_back("b", Tensor::from({2}, {-0.0, 5e-324}));
    c.tensors.emplace_back("c", Tensor::from({1}, {1.0 / 3.0}));
    return c;
}

}  // namespace

TEST_CASE("checkpoint round-trip is bit-exact") {
    const auto dir = testing::temp_dir("ckpt");
    const auto path = dir / "m.ckpt";
    const Checkpoint c = sample_checkpoint();
    write_checkpoint(path, c);
    const Checkpoint r = read_checkpoint(path);
    CHECK(r.meta == c.meta);
    REQUIRE(r.tensors.size() == c.tensors.size());
    for (std::size_t i = 0; i < c.tensors.size(); ++i) {
        CHECK(r.tensors[i].first == c.tensors[i].first);
        CHECK(r.tensors[i].second.shape() == c.tensors[i].second.shape());
        const auto a = c.tensors[i].second.data(), b = r.tensors[i].second.data();
        CHECK(std::memcmp(a.data(), b.data(), a.size_bytes()) == 0);
    }
    CHECK(std::signbit(r.find("b").data()[0]));
    CHECK_THROWS_AS(r.find("missing"), DataError);
}

TEST_CASE("corrupted checkpoints are rejected with located errors") {
    const auto dir = testing::temp_dir("ckpt-bad");
    const auto path = dir / "m.ckpt";
    write_checkpoint(path, sample_checkpoint());
    const std::string good = slurp(path);
    const std::size_t blob_start = good.find('\n') + 1;

    SUBCASE("flipped blob byte names the tensor") {
        std::string bad = good;
        bad[blob_start + 12 * 8 + 3] ^= 0x10;  // inside tensor "b"
        spit(path, bad);
        const auto msg = error_of(path);
        CHECK(msg.find("'b'") != std::string::npos);
        CHECK(msg.find("checksum") != std::string::npos);
    }
    SUBCASE("truncated blob reports the byte counts") {
        spit(path, good.substr(0, good.size() - 5));
        const auto msg = error_of(path);
        CHECK(msg.find("blob holds") != std::string::npos);
    }
    SUBCASE("malformed manifest reports a byte offset") {
        std::string bad = good;
        bad[5] = '}';
        spit(path, bad);
        CHECK(error_of(path).find("byte") != std::string::npos);
    }
    SUBCASE("missing file") {
        CHECK(error_of(dir / "absent.ckpt").find("cannot open") != std::string::npos);
    }
}
