// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "panoact/evaluation.hpp"
#include "support.hpp"

using namespace panoact;
using testing::Gen;

namespace {

Prf set_oracle(const LabelSet& pred, const LabelSet& gt) {
    const std::set<std::size_t> p(pred.begin(), pred.end()), g(gt.begin(), gt.end());
    std::size_t hit = 0;
    for (auto x : p) hit += g.count(x);
    Prf r;
    r.precision = p.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(p.size());
    r.recall = g.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(g.size());
    r.f1 = r.precision + r.recall == 0 ? 0.0 : 2 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

GroupAssignment relabel(const GroupAssignment& g, Gen& gen) {
    std::vector<std::size_t> names(g.count);
    std::iota(names.begin(), names.end(), 10);
    std::shuffle(names.begin(), names.end(), gen.rng);
    GroupAssignment out = g;
    for (auto& l : out.labels) l = names[l];
    return out;  // raw, non-dense labels
}

SceneSample tiny_scene() {
    SceneSpec spec;
    spec.seed = 5;
    spec.individuals = 5;
    spec.groups = 2;
    spec.max_group_size = 3;
    return generate_scene(spec);
}

}  // namespace

TEST_CASE("multilabel precision, recall and F1") {
    const Prf a = multilabel_prf({{0, 1}}, {{1, 2}});
    CHECK(a.precision == 0.5);
    CHECK(a.recall == 0.5);
    CHECK(a.f1 == 0.5);
    const Prf b = multilabel_prf({{3, 4, 9}}, {{9, 4, 3}});
    CHECK(b.precision == 1.0);
    CHECK(b.f1 == 1.0);
    const Prf c = instance_prf({}, {1});
    CHECK(c.precision == 0.0);
    CHECK(c.f1 == 0.0);
    CHECK_THROWS_AS(multilabel_prf({{1}}, {}), ShapeError);

    Gen g(101);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = g.index(1, 6);
        std::vector<LabelSet> pred, gt;
        Prf sum;
        for (std::size_t i = 0; i < n; ++i) {
            pred.push_back(g.label_set(6, 4));
            gt.push_back(g.label_set(6, 4));
            const Prf o = set_oracle(pred.back(), gt.back());
            sum.precision += o.precision;
            sum.recall += o.recall;
            sum.f1 += o.f1;
        }
        const Prf r = multilabel_prf(pred, gt);
        CHECK(std::abs(r.precision - sum.precision / n) <= 1e-12);
        CHECK(std::abs(r.recall - sum.recall / n) <= 1e-12);
        CHECK(std::abs(r.f1 - sum.f1 / n) <= 1e-12);
    }
}

TEST_CASE("group set IoU") {
    CHECK(group_set_iou({1, 2}, {2, 1}) == 1.0);
    CHECK(group_set_iou({1, 2}, {3}) == 0.0);
    CHECK(group_set_iou({1, 2, 3}, {2, 3, 4}) == 0.5);
}

TEST_CASE("group matching") {
    const std::vector<LabelSet> parts{{0, 1}, {2}, {3, 4, 5}};
    const auto same = match_groups(parts, parts);
    REQUIRE(same.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(same[k].gt == k);
        CHECK(same[k].pred == k);
        CHECK(same[k].iou == 1.0);
    }
    const auto swapped = match_groups({{2, 3}, {0, 1}}, {{0, 1}, {2, 3}});
    CHECK(swapped[0].pred == 1);
    CHECK(swapped[1].pred == 0);

    // Ties resolve to the smallest (gt, pred) sequence.
    const auto tied = match_groups({{0, 9}, {0, 8}}, {{0, 1}, {0, 2}});
    CHECK(tied[0].pred == 0);
    CHECK(tied[1].pred == 1);

    Gen g(102);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = g.index(1, 9);
        std::vector<LabelSet> pred, gt;
        for (const auto& m : g.partition(n, g.index(1, 6)).members()) pred.push_back(m);
        for (const auto& m : g.partition(n, g.index(1, 6)).members()) gt.push_back(m);
        double best = 0;
        const auto oracle = testing::brute_force_match(pred, gt, &best);
        const auto got = match_groups(pred, gt);
        double total = 0;
        std::size_t at = 0;
        for (std::size_t gi = 0; gi < gt.size(); ++gi) {
            if (oracle[gi] >= pred.size()) continue;
            REQUIRE(at < got.size());
            CHECK(got[at].gt == gi);
            CHECK(got[at].pred == oracle[gi]);
            total += got[at].iou;
            ++at;
        }
        CHECK(at == got.size());
        CHECK(std::abs(total - best) <= 1e-12);
    }
}

TEST_CASE("group detection scores") {
    const auto gt = GroupAssignment::from_labels({0, 0, 1, 1, 1, 2});
    const auto perfect = group_detection_scores(gt, gt);
    CHECK(perfect.iou_at_half == 1.0);
    CHECK(perfect.iou_auc == 1.0);
    CHECK(perfect.mat_iou == 1.0);

    const auto one = GroupAssignment::from_labels({0, 0, 0, 0});
    const auto singles = GroupAssignment::from_labels({0, 1, 2, 3});
    CHECK(group_detection_scores(singles, one).mat_iou == 0.0);
    CHECK(group_detection_scores(singles, singles).mat_iou == 1.0);

    for (std::size_t i = 0; i < kAucThresholds; ++i) CHECK(auc_threshold(i) == (50.0 + 5.0 * i) / 100.0);
    CHECK(auc_threshold(10) == 1.0);

    Gen g(103);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = g.index(1, 9);
        const auto p = g.partition(n, g.index(1, 6));
        const auto t = g.partition(n, g.index(1, 6));
        const auto s = group_detection_scores(p, t);
        CHECK(s.mat_iou == testing::mat_iou_loop(p, t));

        double best = 0;
        const auto pm = p.members(), tm = t.members();
        const auto col = testing::brute_force_match(pm, tm, &best);
        double auc = 0, half = 0;
        for (std::size_t k = 0; k < kAucThresholds; ++k) {
            double correct = 0;
            for (std::size_t gi = 0; gi < tm.size(); ++gi) {
                if (col[gi] < pm.size() && group_set_iou(pm[col[gi]], tm[gi]) >= auc_threshold(k)) correct += 1;
            }
            const double v =
                testing::f1_from_counts(correct, static_cast<double>(pm.size()), static_cast<double>(tm.size()));
            auc += v;
            if (k == 0) half = v;
        }
        CHECK(s.iou_at_half == half);
        CHECK(s.iou_auc == auc / kAucThresholds);
        CHECK(s.iou_auc <= s.iou_at_half + 1e-12);  // mean of 11 equal terms can round up
        for (double v : {s.iou_at_half, s.iou_auc, s.mat_iou}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        const auto r = group_detection_scores(GroupAssignment::from_labels(relabel(p, g).labels),
                                              GroupAssignment::from_labels(relabel(t, g).labels));
        CHECK(std::abs(r.iou_at_half - s.iou_at_half) <= 1e-12);
        CHECK(std::abs(r.iou_auc - s.iou_auc) <= 1e-12);
        CHECK(r.mat_iou == s.mat_iou);
    }
}

TEST_CASE("scene scoring with stub predictors") {
    const SceneSample s = tiny_scene();
    const Predictor oracle = [](const SceneSample& x, GroupingSource) {
        return Prediction{x.groups, x.individual_labels, x.group_labels, x.global_labels};
    };
    const auto perfect = evaluate(oracle, {s, s}, GroupingSource::GtGroups);
    CHECK(perfect.par.F_i == 1.0);
    CHECK(perfect.par.F_p == 1.0);
    CHECK(perfect.par.F_g == 1.0);
    CHECK(perfect.par.F_a == 1.0);
    CHECK(perfect.det.mat_iou == 1.0);
    CHECK(perfect.scenes == 2);

    // One predicted group swallowing everyone: one matched pair, the other gt group unmatched.
    const Predictor merged = [](const SceneSample& x, GroupingSource) {
        Prediction p;
        p.groups = GroupAssignment::from_labels(std::vector<std::size_t>(x.individuals(), 0));
        p.individual.assign(x.individuals(), {});
        p.social = {x.group_labels[0]};
        return p;
    };
    const auto inst = score_scene(merged(s, GroupingSource::Predicted), s);
    CHECK(inst.social.size() == 2);
    CHECK(inst.individual.size() == s.individuals());
    CHECK(inst.global.f1 == 0.0);
    const auto r = evaluate(merged, {s}, GroupingSource::Predicted);
    CHECK(r.par.F_i == 0.0);
    CHECK(r.par.F_p == doctest::Approx((inst.social[0].f1 + inst.social[1].f1) / 2).epsilon(1e-15));

    // Predicted singletons: unmatched predictions add zero-precision instances.
    const Predictor split = [](const SceneSample& x, GroupingSource) {
        Prediction p;
        std::vector<std::size_t> raw(x.individuals());
        std::iota(raw.begin(), raw.end(), 0);
        p.groups = GroupAssignment::from_labels(raw);
        p.individual = x.individual_labels;
        p.social.assign(x.individuals(), x.group_labels[0]);
        return p;
    };
    const auto many = score_scene(split(s, GroupingSource::Predicted), s);
    CHECK(many.social.size() == s.individuals());
}

TEST_CASE("dataset scores equal a scene-by-scene hand loop") {
    DatasetConfig cfg;
    cfg.scenes = 12;
    cfg.seed = 104;
    const auto data = generate_dataset(cfg, 0);
    Gen g(105);
    std::vector<Prediction> preds;
    for (const auto& s : data) {
        Prediction p;
        p.groups = g.partition(s.individuals(), 4);
        for (std::size_t i = 0; i < s.individuals(); ++i) p.individual.push_back(g.label_set(27, 3));
        for (std::size_t k = 0; k < p.groups.count; ++k) p.social.push_back(g.label_set(11, 3));
        p.global = g.label_set(7, 3);
        preds.push_back(p);
    }
    std::size_t at = 0;
    const Predictor replay = [&](const SceneSample&, GroupingSource) { return preds[at++]; };
    const auto r = evaluate(replay, data, GroupingSource::Predicted);

    double fi = 0, ni = 0, fp = 0, np = 0, fg = 0, mat = 0;
    std::vector<double> correct(kAucThresholds, 0.0);
    double predicted = 0, truth = 0;
    for (std::size_t k = 0; k < data.size(); ++k) {
        const auto& s = data[k];
        const auto& p = preds[k];
        for (std::size_t i = 0; i < s.individuals(); ++i, ni += 1) fi += set_oracle(p.individual[i], s.individual_labels[i]).f1;
        double best = 0;
        const auto pm = p.groups.members(), tm = s.groups.members();
        const auto col = testing::brute_force_match(pm, tm, &best);
        std::size_t matched = 0;
        for (std::size_t gi = 0; gi < tm.size(); ++gi) {
            if (col[gi] >= pm.size()) continue;
            const double iou = group_set_iou(pm[col[gi]], tm[gi]);
            for (std::size_t t = 0; t < kAucThresholds; ++t) correct[t] += iou >= auc_threshold(t);
            if (iou > 0) {
                fp += set_oracle(p.social[col[gi]], s.group_labels[gi]).f1;
                ++matched;
            }
        }
        np += static_cast<double>(tm.size() + pm.size() - matched);
        predicted += static_cast<double>(pm.size());
        truth += static_cast<double>(tm.size());
        fg += set_oracle(p.global, s.global_labels).f1;
        mat += testing::mat_iou_loop(p.groups, s.groups);
    }
    CHECK(std::abs(r.par.F_i - fi / ni) <= 1e-12);
    CHECK(std::abs(r.par.F_p - fp / np) <= 1e-12);
    CHECK(std::abs(r.par.F_g - fg / static_cast<double>(data.size())) <= 1e-12);
    CHECK(std::abs(r.par.F_a - (r.par.F_i + r.par.F_p + r.par.F_g) / 3.0) <= 1e-12);
    CHECK(std::abs(r.det.mat_iou - mat / static_cast<double>(data.size())) <= 1e-12);
    CHECK(std::abs(r.det.iou_at_half - testing::f1_from_counts(correct[0], predicted, truth)) <= 1e-12);
    for (double v : score_values(r)) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("score export") {
    CHECK(scores_csv_header() == "P_i,R_i,F_i,P_p,R_p,F_p,P_g,R_g,F_g,F_a,IoU@0.5,IoU@AUC,Mat.IoU");
    EvalResult r;
    r.par = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.6};
    r.det = {0.25, 0.125, 1.0};
    r.scenes = 3;
    CHECK(scores_csv_row(r) ==
          "0.100000,0.200000,0.300000,0.400000,0.500000,0.600000,0.700000,0.800000,0.900000,0.600000,0.250000,"
          "0.125000,1.000000");
    const auto j = scores_json(r);
    CHECK(j.at("F_a") == 0.6);
    CHECK(j.at("group_detection").at("Mat.IoU") == 1.0);
    CHECK(j.at("social").at("F_p") == 0.6);
    CHECK(score_columns().size() == 13);
}
