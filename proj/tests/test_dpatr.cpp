// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "panoact/dpatr.hpp"
#include "panoact/gradcheck.hpp"
#include "support.hpp"

using namespace panoact;
using testing::Gen;
namespace ref = testing::ref;

namespace {

constexpr std::size_t kD = 8;

struct RefFeatures {
    ref::Mat individuals, global, social;
};

// [token; rows] through one block, split back.
std::pair<ref::Mat, ref::Mat> ref_prefixed(const ref::Mat& token, const ref::Mat& rows, const EncoderBlockParams& p) {
    const ref::Mat out = ref::encoder_block(ref::stack(token, rows), p);
    std::vector<std::size_t> head(token.rows), tail(rows.rows);
    for (std::size_t i = 0; i < token.rows; ++i) head[i] = i;
    for (std::size_t i = 0; i < rows.rows; ++i) tail[i] = token.rows + i;
    return {ref::rows(out, head), ref::rows(out, tail)};
}

std::pair<ref::Mat, ref::Mat> ref_social(const ref::Mat& social, const ref::Mat& individuals, const GroupAssignment& g,
                                         const EncoderBlockParams& p) {
    ref::Mat tokens{0, social.cols, {}};
    ref::Mat out = individuals;
    const auto members = g.members();
    for (std::size_t k = 0; k < members.size(); ++k) {
        auto [tok, rows] = ref_prefixed(ref::rows(social, {k}), ref::rows(individuals, members[k]), p);
        tokens = ref::stack(tokens, tok);
        for (std::size_t m = 0; m < members[k].size(); ++m) {
            for (std::size_t c = 0; c < out.cols; ++c) out(members[k][m], c) = rows(m, c);
        }
    }
    return {tokens, out};
}

RefFeatures ref_layer(const RefFeatures& in, const GroupAssignment& g, const DpatrLayerParams& p) {
    auto [global, mid] = ref_prefixed(in.global, in.individuals, p.global_path);
    auto [social, individuals] = ref_social(in.social, mid, g, p.social_path);
    return {individuals, global, social};
}

ref::Mat replicate(const Tensor& row, std::size_t count) {
    return ref::rows(ref::of(row), std::vector<std::size_t>(count, 0));
}

struct Fixture {
    ParamStore store;
    Initializer init{71};
    std::vector<DpatrLayerParams> layers;
    TokenBank tokens;
    AltStructureParams alt;
    ActivityHeads heads;

    explicit Fixture(std::size_t n_layers, std::uint64_t seed = 72) {
        for (std::size_t l = 0; l < n_layers; ++l) layers.push_back(make_dpatr_layer(store, "dpatr." + std::to_string(l), kD, 2, init));
        tokens = make_token_bank(store, "tokens", kD, init);
        alt = make_alt_structure(store, "alt", kD, 2, init);
        heads = make_activity_heads(store, "heads", kD, 5, 4, 3, init);
        testing::randomize(store, seed);
    }
};

void check_close(const Tensor& t, const ref::Mat& m, double tol) {
    CHECK(t.numel() == m.v.size());
    CHECK(testing::max_abs_diff(t.data(), m.v) <= tol);
}

}  // namespace

TEST_CASE("dpatr layer with zero parameters is the identity") {
    Fixture fx(1);
    fx.store.fill("dpatr.", 0.0);
    Gen g(73);
    const Tensor x = g.tensor({5, kD}), gl = g.tensor({1, kD}), so = g.tensor({2, kD});
    const auto groups = GroupAssignment::from_labels({0, 1, 0, 1, 1});
    const auto out = dpatr_layer({x, gl, so}, groups, fx.layers[0]);
    CHECK(testing::bitwise_equal(out.individuals.data(), x.data()));
    CHECK(testing::bitwise_equal(out.global.data(), gl.data()));
    CHECK(testing::bitwise_equal(out.social.data(), so.data()));
}

TEST_CASE("dpatr layer matches the hand-composed two-block oracle") {
    Fixture fx(1);
    Gen g(74);
    SUBCASE("two individuals, one group") {
        const Tensor x = g.tensor({2, kD}), gl = g.tensor({1, kD}), so = g.tensor({1, kD});
        const auto groups = GroupAssignment::from_labels({0, 0});
        const auto out = dpatr_layer({x, gl, so}, groups, fx.layers[0]);
        const auto expect = ref_layer({ref::of(x), ref::of(gl), ref::of(so)}, groups, fx.layers[0]);
        check_close(out.individuals, expect.individuals, 1e-12);
        check_close(out.global, expect.global, 1e-12);
        check_close(out.social, expect.social, 1e-12);
    }
    SUBCASE("interleaved groups") {
        const Tensor x = g.tensor({6, kD}), gl = g.tensor({1, kD}), so = g.tensor({3, kD});
        const auto groups = GroupAssignment::from_labels({0, 1, 2, 1, 0, 1});
        const auto out = dpatr_layer({x, gl, so}, groups, fx.layers[0]);
        const auto expect = ref_layer({ref::of(x), ref::of(gl), ref::of(so)}, groups, fx.layers[0]);
        check_close(out.individuals, expect.individuals, 1e-12);
        check_close(out.social, expect.social, 1e-12);
    }
}

TEST_CASE("dpatr forward composes layers") {
    Gen g(75);
    const Tensor x = g.tensor({3, kD});
    const auto groups = GroupAssignment::from_labels({0, 1, 0});

    Fixture two(2);
    const auto out = dpatr_forward(x, groups, two.layers, two.tokens);
    RefFeatures f{ref::of(x), ref::of(two.tokens.global_token), replicate(two.tokens.social_token, 2)};
    f = ref_layer(ref_layer(f, groups, two.layers[0]), groups, two.layers[1]);
    check_close(out.individuals, f.individuals, 1e-12);
    check_close(out.global, f.global, 1e-12);
    check_close(out.social, f.social, 1e-12);

    Fixture one(1);
    const auto single = dpatr_forward(x, groups, one.layers, one.tokens);
    const auto layer = dpatr_layer({x, one.tokens.global_token, index_rows(one.tokens.social_token, {0, 0})}, groups,
                                   one.layers[0]);
    CHECK(testing::bitwise_equal(single.individuals.data(), layer.individuals.data()));
    CHECK(testing::bitwise_equal(single.social.data(), layer.social.data()));

    // Appending identity layers changes nothing.
    Fixture padded(2);
    padded.store.fill("dpatr.1.", 0.0);
    auto copy_layer = [](const EncoderBlockParams& from, EncoderBlockParams& to) {
        auto copy = [](const Tensor& a, Tensor& b) {
            if (a.defined()) std::copy(a.data().begin(), a.data().end(), b.mutable_data().begin());
        };
        copy(from.norm1_gain, to.norm1_gain);
        copy(from.norm1_bias, to.norm1_bias);
        copy(from.norm2_gain, to.norm2_gain);
        copy(from.norm2_bias, to.norm2_bias);
        for (auto [a, b] : {std::pair{&from.attention.query, &to.attention.query}, {&from.attention.key, &to.attention.key},
                            {&from.attention.value, &to.attention.value}, {&from.attention.output, &to.attention.output},
                            {&from.ffn_in, &to.ffn_in}, {&from.ffn_out, &to.ffn_out}}) {
            copy(a->weight, b->weight);
            copy(a->bias, b->bias);
        }
    };
    copy_layer(one.layers[0].global_path, padded.layers[0].global_path);
    copy_layer(one.layers[0].social_path, padded.layers[0].social_path);
    std::copy(one.tokens.global_token.data().begin(), one.tokens.global_token.data().end(),
              padded.tokens.global_token.mutable_data().begin());
    std::copy(one.tokens.social_token.data().begin(), one.tokens.social_token.data().end(),
              padded.tokens.social_token.mutable_data().begin());
    const auto deep = dpatr_forward(x, groups, padded.layers, padded.tokens);
    CHECK(testing::bitwise_equal(deep.individuals.data(), single.individuals.data()));
    CHECK(testing::bitwise_equal(deep.global.data(), single.global.data()));
    CHECK(testing::bitwise_equal(deep.social.data(), single.social.data()));

    CHECK_THROWS_AS(dpatr_forward(x, groups, {}, one.tokens), ConfigError);
}

TEST_CASE("dpatr is equivariant to relabeling individuals") {
    Fixture fx(2);
    Gen g(76);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = g.index(2, 7);
        const Tensor x = g.tensor({n, kD});
        const auto groups = g.partition(n, 3);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), g.rng);
        std::vector<std::size_t> raw(n);
        for (std::size_t i = 0; i < n; ++i) raw[i] = groups.labels[perm[i]];
        const auto permuted = GroupAssignment::from_labels(raw);

        const auto a = dpatr_forward(x, groups, fx.layers, fx.tokens);
        const auto b = dpatr_forward(index_rows(x, perm), permuted, fx.layers, fx.tokens);
        CHECK(testing::max_abs_diff(index_rows(a.individuals, perm).data(), b.individuals.data()) <= 1e-12);
        CHECK(testing::max_abs_diff(a.global.data(), b.global.data()) <= 1e-12);
        // Group k of the permuted labelling is the old group raw[first member].
        for (std::size_t k = 0; k < permuted.count; ++k) {
            const std::size_t first = static_cast<std::size_t>(
                std::find(permuted.labels.begin(), permuted.labels.end(), k) - permuted.labels.begin());
            const std::size_t old = raw[first];
            CHECK(testing::max_abs_diff(slice(a.social, 0, old, 1).data(), slice(b.social, 0, k, 1).data()) <= 1e-12);
        }
    }
}

TEST_CASE("social attention stays inside the group") {
    Fixture fx(1);
    fx.store.fill("dpatr.0.global_path", 0.0);
    Gen g(77);
    const Tensor x = g.tensor({6, kD});
    const auto groups = GroupAssignment::from_labels({0, 1, 0, 2, 1, 0});
    const Tensor social = g.tensor({3, kD});
    const auto base = dpatr_layer({x, fx.tokens.global_token, social}, groups, fx.layers[0]);
    for (std::size_t k = 0; k < 3; ++k) {
        Tensor masked = x.clone();
        auto v = masked.mutable_data();
        for (std::size_t i = 0; i < 6; ++i) {
            if (groups.labels[i] != k) std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(i * kD), kD, 0.0);
        }
        const auto out = dpatr_layer({masked, fx.tokens.global_token, social}, groups, fx.layers[0]);
        CHECK(testing::bitwise_equal(slice(out.social, 0, k, 1).data(), slice(base.social, 0, k, 1).data()));
    }
}

TEST_CASE("the global loss reaches every individual") {
    Fixture fx(2);
    Gen g(78);
    Tensor x = g.tensor({5, kD}, -1, 1, true);
    const auto groups = GroupAssignment::from_labels({0, 0, 1, 2, 2});
    const auto f = dpatr_forward(x, groups, fx.layers, fx.tokens);
    sum(classify(f, fx.heads).global).backward();
    for (std::size_t i = 0; i < 5; ++i) {
        double norm = 0;
        for (std::size_t c = 0; c < kD; ++c) norm += std::abs(x.grad()[i * kD + c]);
        CHECK(norm > 1e-8);
    }
}

TEST_CASE("equal groupings give bitwise-equal outputs") {
    Fixture fx(2);
    Gen g(79);
    const Tensor x = g.tensor({4, kD});
    const auto gt = GroupAssignment::from_labels({3, 3, 1, 1});
    const auto predicted = GroupAssignment::from_labels({0, 0, 5, 5});
    const auto a = dpatr_forward(x, gt, fx.layers, fx.tokens);
    const auto b = dpatr_forward(x, predicted, fx.layers, fx.tokens);
    CHECK(testing::bitwise_equal(a.individuals.data(), b.individuals.data()));
    CHECK(testing::bitwise_equal(a.social.data(), b.social.data()));
    CHECK(testing::bitwise_equal(a.global.data(), b.global.data()));
}

TEST_CASE("dpatr gradients") {
    Fixture fx(1);
    Gen g(80);
    Tensor x = g.tensor({3, kD});
    const auto groups = GroupAssignment::from_labels({0, 1, 0});
    std::vector<Tensor> params{x};
    for (auto& [n, t] : fx.store.items()) {
        if (n.rfind("alt.", 0) != 0) params.push_back(t);
    }
    const auto report = grad_check(
        [&] {
            const auto s = classify(dpatr_forward(x, groups, fx.layers, fx.tokens), fx.heads);
            return add(add(sum(s.individual), sum(s.social)), sum(s.global));
        },
        params);
    // Composite graph: some entries are ~1e-7, where central differences carry ~1e-11 noise.
    CHECK(report.max_relative_error < 1e-4);
}

TEST_CASE("classifiers") {
    ParamStore store;
    Initializer init(81);
    auto heads = make_activity_heads(store, "h", 2, 3, 2, 1, init);
    Gen g(82);
    const ActivityFeatures f{g.tensor({4, 2}), g.tensor({1, 2}), g.tensor({2, 2})};

    store.fill("h.", 0.0);
    auto s = classify(f, heads);
    CHECK(s.individual.shape() == Shape{4, 3});
    CHECK(s.social.shape() == Shape{2, 2});
    CHECK(s.global.shape() == Shape{1, 1});
    for (double v : s.individual.data()) CHECK(v == 0.5);
    CHECK(positive_classes(s.individual.data().first(3)).empty());

    store.fill("h.individual.bias", 40.0);
    s = classify(f, heads);
    for (double v : s.individual.data()) CHECK(v > 1.0 - 1e-15);
    CHECK(positive_classes(s.individual.data().first(3)) == std::vector<std::size_t>{0, 1, 2});

    // Hand-set 1 x 2 head on a unit feature.
    auto w = heads.social.weight.mutable_data();
    w[0] = 0.3, w[1] = -1.2, w[2] = 0.7, w[3] = 0.4;
    heads.social.bias.mutable_data()[0] = 0.1;
    heads.social.bias.mutable_data()[1] = -0.2;
    const ActivityFeatures unit{f.individuals, f.global, Tensor::from({1, 2}, {1.0, 0.0})};
    s = classify(unit, heads);
    CHECK(s.social.at({0, 0}) == doctest::Approx(1.0 / (1.0 + std::exp(-0.4))).epsilon(1e-15));
    CHECK(s.social.at({0, 1}) == doctest::Approx(1.0 / (1.0 + std::exp(1.4))).epsilon(1e-15));
}

TEST_CASE("comparison structures") {
    Fixture fx(1);
    Gen g(83);
    const Tensor x = g.tensor({2, kD});
    const auto groups = GroupAssignment::from_labels({0, 0});
    const ref::Mat xm = ref::of(x), gt = ref::of(fx.tokens.global_token), st = replicate(fx.tokens.social_token, 1);

    SUBCASE("parallel") {
        const auto out = alt_structure_forward(Structure::Parallel, x, groups, fx.alt, fx.tokens);
        check_close(out.individuals, ref::encoder_block(xm, fx.alt.individual), 1e-12);
        check_close(out.social, ref_social(st, xm, groups, fx.alt.social).first, 1e-12);
        check_close(out.global, ref_prefixed(gt, xm, fx.alt.global).first, 1e-12);
        const auto split = alt_structure_forward(Structure::Parallel, x, GroupAssignment::from_labels({0, 1}), fx.alt,
                                                 fx.tokens);
        CHECK(testing::bitwise_equal(split.individuals.data(), out.individuals.data()));
    }
    SUBCASE("hierarchical") {
        const auto out = alt_structure_forward(Structure::Hierarchical, x, groups, fx.alt, fx.tokens);
        const ref::Mat idv = ref::encoder_block(xm, fx.alt.individual);
        const ref::Mat soc = ref_social(st, idv, groups, fx.alt.social).first;
        check_close(out.individuals, idv, 1e-12);
        check_close(out.social, soc, 1e-12);
        check_close(out.global, ref_prefixed(gt, ref::stack(soc, idv), fx.alt.global).first, 1e-12);
    }
    SUBCASE("reverse") {
        const auto out = alt_structure_forward(Structure::Reverse, x, groups, fx.alt, fx.tokens);
        auto [glb, scene] = ref_prefixed(gt, xm, fx.alt.global);
        auto [soc, grp] = ref_social(st, scene, groups, fx.alt.social);
        check_close(out.global, glb, 1e-12);
        check_close(out.social, soc, 1e-12);
        check_close(out.individuals, ref::encoder_block(grp, fx.alt.individual), 1e-12);
    }
    SUBCASE("zero parameters pass features and tokens through") {
        fx.store.fill("alt.", 0.0);
        for (auto v : {Structure::Parallel, Structure::Hierarchical, Structure::Reverse}) {
            const auto out = alt_structure_forward(v, x, groups, fx.alt, fx.tokens);
            CHECK(testing::bitwise_equal(out.individuals.data(), x.data()));
            CHECK(testing::bitwise_equal(out.global.data(), fx.tokens.global_token.data()));
            CHECK(testing::bitwise_equal(out.social.data(), fx.tokens.social_token.data()));
        }
    }
    CHECK_THROWS_AS(alt_structure_forward(Structure::Dpatr, x, groups, fx.alt, fx.tokens), ConfigError);
    for (auto v : {Structure::Dpatr, Structure::Parallel, Structure::Hierarchical, Structure::Reverse}) {
        CHECK(parse_structure(to_string(v)) == v);
    }
    CHECK_THROWS_AS(parse_structure("serial"), ConfigError);
}
