// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "panoact/gradcheck.hpp"
#include "panoact/training.hpp"
#include "support.hpp"

using namespace panoact;

namespace {

struct Micro {
    DatasetConfig data;
    ModelConfig model;
};

Micro micro(std::size_t scenes, std::uint64_t seed) {
    Micro m;
    m.data.scenes = scenes;
    m.data.seed = seed;
    m.data.min_individuals = 3;
    m.data.max_individuals = 4;
    auto& b = m.data.base;
    b.frames = 2;
    b.grid_h = 4;
    b.grid_w = 16;
    b.feature_dim = 8;
    b.crop_h = 2;
    b.crop_w = 2;
    m.model.feature_dim = 8;
    m.model.d = 8;
    m.model.heads = 2;
    m.model.layers = 1;
    m.model.frames = 2;
    m.model.grid_h = 4;
    m.model.grid_w = 16;
    m.model.seed = seed;
    return m;
}

TrainConfig quick(std::size_t epochs, double lr) {
    TrainConfig c;
    c.epochs = epochs;
    c.warmup_epochs = 1;
    c.lr = lr;
    c.batch = 2;
    c.seed = 9;
    return c;
}

std::vector<double> flat_params(const Model& m) {
    std::vector<double> out;
    for (const auto& [name, t] : m.params().items()) out.insert(out.end(), t.data().begin(), t.data().end());
    return out;
}

std::size_t line_count(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) n += !line.empty();
    return n;
}

}  // namespace

TEST_CASE("binary cross-entropy") {
    const double ln2 = std::log(2.0);
    CHECK(std::abs(bce_loss(Tensor::full({2, 3}, 0.5), Tensor::from({2, 3}, {1, 0, 1, 0, 0, 1})).item() - ln2) <=
          1e-15);
    CHECK(std::abs(bce_loss(Tensor::from({1}, {0.9}), Tensor::from({1}, {1})).item() + std::log(0.9)) <= 1e-15);
    // Clipped at 1e-7 instead of diverging.
    CHECK(std::abs(bce_loss(Tensor::from({1}, {0.0}), Tensor::from({1}, {1})).item() + std::log(kScoreClip)) <=
          1e-12);
    CHECK(std::abs(bce_loss(Tensor::from({1}, {1.0}), Tensor::from({1}, {0})).item() + std::log(kScoreClip)) <= 1e-9);
    CHECK_THROWS_AS(bce_loss(Tensor::zeros({2}), Tensor::zeros({3})), ShapeError);
}

TEST_CASE("relation loss over off-diagonal pairs") {
    const auto g = GroupAssignment::from_labels({0, 0, 1});
    CHECK(std::abs(relation_loss(Tensor::full({3, 3}, 0.5), g).item() - std::log(2.0)) <= 1e-15);
    // Diagonal entries are ignored: the perfect off-diagonal estimate costs only the clip.
    const Tensor perfect = Tensor::from({3, 3}, {0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.3});
    CHECK(relation_loss(perfect, g).item() <= 2e-7);
    // Hand value: one wrong pair at 0.8 among six.
    const Tensor one_off = Tensor::from({3, 3}, {0.5, 1.0, 0.8, 1.0, 0.5, 0.0, 0.0, 0.0, 0.5});
    const double want = (-std::log(0.2) - 5 * std::log(1 - kScoreClip)) / 6.0;
    CHECK(std::abs(relation_loss(one_off, g).item() - want) <= 1e-12);
    CHECK(relation_loss(Tensor::full({1, 1}, 0.5), GroupAssignment::from_labels({0})).item() == 0.0);
    CHECK_THROWS_AS(relation_loss(Tensor::zeros({2, 2}), g), ShapeError);
}

TEST_CASE("group count loss") {
    CHECK(count_loss(Tensor::from({1}, {0.5}), 2, 4).item() == 0.0);
    CHECK(count_loss(Tensor::from({1}, {1.0}), 1, 4).item() == 0.5625);
    CHECK_THROWS_AS(count_loss(Tensor::zeros({2}), 1, 4), ShapeError);
    CHECK_THROWS_AS(count_loss(Tensor::zeros({1}), 1, 0), ConfigError);
}

TEST_CASE("multi-hot targets") {
    const Tensor t = multi_hot({{0, 2}, {}, {1}}, 3);
    CHECK(t.shape() == Shape{3, 3});
    const std::vector<double> want{1, 0, 1, 0, 0, 0, 0, 1, 0};
    CHECK(std::equal(want.begin(), want.end(), t.data().begin()));
    CHECK_THROWS_AS(multi_hot({{3}}, 3), DataError);
}

TEST_CASE("loss combination") {
    std::vector<Tensor> ones(6, Tensor::full({}, 1.0));
    CHECK(combine_losses(ones, LossWeights{}).item() == 13.0);
    LossWeights w;
    w.individual = 0.5;
    w.count = 0;
    std::vector<Tensor> parts;
    for (double v : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) parts.push_back(Tensor::full({}, v));
    CHECK(combine_losses(parts, w).item() == 0.5 + 2 + 3 + 12 + 10);
    CHECK_THROWS_AS(combine_losses({ones[0]}, w), ShapeError);
    w.global = -1;
    CHECK_THROWS_AS(w.validate(), ConfigError);
}

TEST_CASE("learning-rate schedule") {
    CHECK(lr_schedule(0, 10, 1e-3) == 0.0);
    CHECK(lr_schedule(5, 10, 1e-3) == 5e-4);
    CHECK(lr_schedule(10, 10, 1e-3) == 1e-3);
    CHECK(lr_schedule(99, 10, 1e-3) == 1e-3);
    CHECK(lr_schedule(0, 0, 1e-3) == 1e-3);
    for (std::size_t s = 1; s < 20; ++s) CHECK(lr_schedule(s, 20, 1.0) >= lr_schedule(s - 1, 20, 1.0));
    TrainConfig c;
    c.warmup_epochs = c.epochs + 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("scene loss parts and gradients") {
    const Micro m = micro(2, 21);
    const auto data = generate_dataset(m.data, 0);
    Model model(m.model);
    const LossWeights w;
    const LossParts parts = scene_loss(model, data[0], w);
    const double want = w.individual * parts.individual + w.relation * parts.relation + w.aux * parts.aux +
                        w.social * parts.social + w.global * parts.global + w.count * parts.count;
    CHECK(std::abs(parts.total.item() - want) <= 1e-12);
    for (double v : {parts.individual, parts.relation, parts.aux, parts.social, parts.global}) CHECK(v > 0.0);

    // Fixed two-individual scene; some random draws put a ReLU kink or the
    // score clip within h of the point, where central differences disagree.
    const Micro pm = micro(1, 32);
    SceneSpec spec = pm.data.base;
    spec.seed = 32;
    spec.individuals = 2;
    spec.groups = 1;
    const SceneSample pair = generate_scene(spec);
    Model small(pm.model);
    std::vector<Tensor> params;
    for (const auto& item : small.params().items()) params.push_back(item.second);
    const auto report = grad_check([&] { return scene_loss(small, pair, w).total; }, params);
    CHECK(report.checked == small.params().scalar_count());
    CHECK(report.max_relative_error < 1e-4);
}

TEST_CASE("forward differs between grouping sources only in the groups") {
    const Micro m = micro(4, 22);
    const auto data = generate_dataset(m.data, 0);
    Model model(m.model);
    for (const auto& s : data) {
        for (auto source : {GroupingSource::Predicted, GroupingSource::GtCount, GroupingSource::GtGroups}) {
            const Recognition r = model.forward(s, source);
            const ActivityScores again = model.recognize(r.encoded.pooled, r.groups);
            CHECK(testing::bitwise_equal(r.scores.individual.data(), again.individual.data()));
            CHECK(testing::bitwise_equal(r.scores.global.data(), again.global.data()));
            if (source == GroupingSource::GtGroups) CHECK(r.groups == s.groups);
            if (source == GroupingSource::GtCount) CHECK(r.groups.count == s.groups.count);
        }
    }
    CHECK(parse_grouping("gt_count") == GroupingSource::GtCount);
    CHECK_THROWS_AS(parse_grouping("oracle"), ConfigError);
}

TEST_CASE("training loop") {
    const Micro m = micro(6, 23);
    const auto train_set = generate_dataset(m.data, 0);
    DatasetConfig vc = m.data;
    vc.scenes = 3;
    const auto val_set = generate_dataset(vc, 1);

    SUBCASE("zero learning rate leaves parameters bitwise unchanged") {
        Model model(m.model);
        const auto before = flat_params(model);
        AdamState opt(model.params(), AdamConfig{});
        train(model, opt, train_set, val_set, quick(2, 0.0), LossWeights{});
        CHECK(opt.steps() == 6);
        CHECK(testing::bitwise_equal(before, flat_params(model)));
    }

    SUBCASE("runs are bitwise reproducible") {
        std::vector<std::vector<double>> params, losses;
        for (int run = 0; run < 2; ++run) {
            Model model(m.model);
            AdamState opt(model.params(), AdamConfig{});
            const auto r = train(model, opt, train_set, val_set, quick(2, 1e-3), LossWeights{});
            params.push_back(flat_params(model));
            losses.push_back(r.step_losses);
        }
        CHECK(testing::bitwise_equal(params[0], params[1]));
        CHECK(testing::bitwise_equal(losses[0], losses[1]));
    }

    SUBCASE("loss decreases") {
        Model model(m.model);
        AdamState opt(model.params(), AdamConfig{});
        const auto r = train(model, opt, train_set, val_set, quick(8, 3e-3), LossWeights{});
        REQUIRE(r.log.size() == 8);
        CHECK(r.log.back().loss < r.log.front().loss);
        CHECK(r.best_fa >= 0.0);
        CHECK(r.best_epoch < 8);
    }

    SUBCASE("resume continues exactly") {
        const auto dir = testing::temp_dir("resume");
        Model full(m.model);
        AdamState full_opt(full.params(), AdamConfig{});
        const auto straight = train(full, full_opt, train_set, val_set, quick(4, 1e-3), LossWeights{});

        Model part(m.model);
        AdamState part_opt(part.params(), AdamConfig{});
        TrainOptions o;
        o.run_dir = dir;
        TrainConfig first = quick(4, 1e-3);
        first.epochs = 2;
        first.warmup_epochs = 1;
        train(part, part_opt, train_set, val_set, first, LossWeights{}, o);
        CHECK(std::filesystem::exists(dir / "best.ckpt"));
        CHECK(line_count(dir / "log.jsonl") == 2);

        const Checkpoint ckpt = read_checkpoint(dir / "last.ckpt");
        Model resumed = Model::from_checkpoint(ckpt);
        AdamState resumed_opt(resumed.params(), AdamConfig{});
        restore_training(ckpt, resumed, resumed_opt);
        CHECK(resumed_opt.steps() == 6);
        o.meta = ckpt.meta;
        const auto rest = train(resumed, resumed_opt, train_set, val_set, quick(4, 1e-3), LossWeights{}, o);
        CHECK(rest.log.size() == 2);
        CHECK(rest.log.front().epoch == 2);
        CHECK(line_count(dir / "log.jsonl") == 4);
        CHECK(testing::bitwise_equal(flat_params(full), flat_params(resumed)));
        CHECK(rest.log.back().loss == straight.log.back().loss);
        std::filesystem::remove_all(dir);
    }

    SUBCASE("input errors") {
        Model model(m.model);
        AdamState opt(model.params(), AdamConfig{});
        CHECK_THROWS_AS(train(model, opt, {}, val_set, quick(1, 1e-3), LossWeights{}), DataError);
        Micro other = micro(1, 24);
        other.data.base.feature_dim = 4;
        CHECK_THROWS_WITH_AS(train(model, opt, generate_dataset(other.data, 0), {}, quick(1, 1e-3), LossWeights{}),
                             doctest::Contains("feature_dim"), DataError);
        model.params().fill("heads", std::nan(""));
        CHECK_THROWS_AS(train(model, opt, train_set, {}, quick(1, 1e-3), LossWeights{}), NumericError);
    }
}

TEST_CASE("training checkpoints reject mismatched state") {
    const Micro m = micro(1, 25);
    Model a(m.model);
    AdamState opt(a.params(), AdamConfig{});
    const Checkpoint ckpt = training_checkpoint(a, opt, {{"note", "x"}});
    CHECK(ckpt.meta.at("note") == "x");
    CHECK(ckpt.meta.contains("adam"));
    ModelConfig wider = m.model;
    wider.d = 16;
    Model b(wider);
    AdamState opt_b(b.params(), AdamConfig{});
    CHECK_THROWS_AS(restore_training(ckpt, b, opt_b), DataError);
    Checkpoint missing = ckpt;
    missing.tensors.pop_back();
    Model c(m.model);
    AdamState opt_c(c.params(), AdamConfig{});
    CHECK_THROWS_AS(restore_training(missing, c, opt_c), DataError);
}
