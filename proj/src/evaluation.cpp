// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace panoact {

namespace {

std::size_t intersection_size(LabelSet a, LabelSet b) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    LabelSet both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    return both.size();
}

std::size_t distinct(LabelSet a) {
    std::sort(a.begin(), a.end());
    return static_cast<std::size_t>(std::unique(a.begin(), a.end()) - a.begin());
}

Prf mean_of(const std::vector<Prf>& items) {
    Prf m;
    if (items.empty()) return m;
    for (const Prf& p : items) {
        m.precision += p.precision;
        m.recall += p.recall;
        m.f1 += p.f1;
    }
    const auto n = static_cast<double>(items.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    return m;
}

double f1_of(double correct, double predicted, double truth) {
    if (correct == 0) return 0.0;
    const double p = correct / predicted, r = correct / truth;
    return 2 * p * r / (p + r);
}

GroupDetScores scores_from(const GroupCounts& c, double mat_iou) {
    GroupDetScores s;
    s.iou_at_half = f1_of(c.correct[0], c.predicted, c.truth);
    double total = 0;
    for (std::size_t i = 0; i < kAucThresholds; ++i) total += f1_of(c.correct[i], c.predicted, c.truth);
    s.iou_auc = total / static_cast<double>(kAucThresholds);
    s.mat_iou = mat_iou;
    return s;
}

double mat_iou_of(const GroupCounts& c) { return c.mat_union == 0 ? 1.0 : c.mat_intersection / c.mat_union; }

}  // namespace

Prf instance_prf(const LabelSet& pred, const LabelSet& gt) {
    Prf p;
    const auto hit = static_cast<double>(intersection_size(pred, gt));
    const auto np = static_cast<double>(distinct(pred));
    const auto ng = static_cast<double>(distinct(gt));
    p.precision = np == 0 ? 0.0 : hit / np;
    p.recall = ng == 0 ? 0.0 : hit / ng;
    p.f1 = p.precision + p.recall == 0 ? 0.0 : 2 * p.precision * p.recall / (p.precision + p.recall);
    return p;
}

Prf multilabel_prf(const std::vector<LabelSet>& pred, const std::vector<LabelSet>& gt) {
    if (pred.size() != gt.size()) {
        throw ShapeError("multilabel_prf: " + std::to_string(pred.size()) + " predictions for " +
                         std::to_string(gt.size()) + " targets");
    }
    std::vector<Prf> items;
    for (std::size_t i = 0; i < pred.size(); ++i) items.push_back(instance_prf(pred[i], gt[i]));
    return mean_of(items);
}

double group_set_iou(const LabelSet& a, const LabelSet& b) {
    const auto inter = static_cast<double>(intersection_size(a, b));
    const auto uni = static_cast<double>(distinct(a) + distinct(b)) - inter;
    return uni == 0 ? 0.0 : inter / uni;
}

std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t n) {
    if (cost.size() != n * n) throw ShapeError("hungarian: cost must be n x n");
    // Shortest augmenting paths with row/column potentials, 1-based internally.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> col_of(n);
    for (std::size_t j = 1; j <= n; ++j) col_of[p[j] - 1] = j - 1;
    return col_of;
}

std::vector<GroupMatch> match_groups(const std::vector<LabelSet>& pred, const std::vector<LabelSet>& gt) {
    const std::size_t n = std::max(pred.size(), gt.size());
    if (n == 0) return {};
    // Rows are gt groups, columns predicted groups; padding costs nothing.
    std::vector<double> cost(n * n, 0.0);
    for (std::size_t g = 0; g < gt.size(); ++g) {
        for (std::size_t q = 0; q < pred.size(); ++q) cost[g * n + q] = -group_set_iou(pred[q], gt[g]);
    }
    auto total = [&](const std::vector<double>& c, const std::vector<std::size_t>& col) {
        double t = 0;
        for (std::size_t r = 0; r < n; ++r) t += c[r * n + col[r]];
        return t;
    };
    const double best = total(cost, hungarian(cost, n));

    // Among optimal matchings take the lexicographically smallest (gt, pred)
    // sequence: fix rows in order to the lowest column that keeps the optimum.
    const double forbid = static_cast<double>(n) + 1.0;
    std::vector<double> fixed = cost;
    std::vector<std::size_t> col(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t q = 0; q < n; ++q) {
            std::vector<double> trial = fixed;
            for (std::size_t c = 0; c < n; ++c) {
                if (c != q) trial[r * n + c] = forbid;
            }
            for (std::size_t o = r + 1; o < n; ++o) trial[o * n + q] = forbid;
            const auto assignment = hungarian(trial, n);
            if (total(trial, assignment) <= best + 1e-9) {
                col[r] = q;
                fixed = std::move(trial);
                break;
            }
        }
    }

    std::vector<GroupMatch> out;
    for (std::size_t g = 0; g < gt.size(); ++g) {
        if (col[g] < pred.size()) out.push_back({col[g], g, group_set_iou(pred[col[g]], gt[g])});
    }
    return out;
}

double auc_threshold(std::size_t i) { return static_cast<double>(50 + 5 * i) / 100.0; }

GroupCounts group_counts(const GroupAssignment& pred, const GroupAssignment& gt) {
    if (pred.individuals() != gt.individuals()) throw ShapeError("group partitions cover different individuals");
    GroupCounts c;
    c.correct.assign(kAucThresholds, 0.0);
    const auto pm = pred.members();
    const auto gm = gt.members();
    c.predicted = static_cast<double>(pm.size());
    c.truth = static_cast<double>(gm.size());
    for (const GroupMatch& m : match_groups(pm, gm)) {
        for (std::size_t i = 0; i < kAucThresholds; ++i) {
            if (m.iou >= auc_threshold(i)) c.correct[i] += 1;
        }
    }
    const std::size_t n = gt.individuals();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool a = pred.labels[i] == pred.labels[j];
            const bool b = gt.labels[i] == gt.labels[j];
            c.mat_intersection += (a && b) ? 1 : 0;
            c.mat_union += (a || b) ? 1 : 0;
        }
    }
    return c;
}

GroupDetScores group_detection_scores(const GroupAssignment& pred, const GroupAssignment& gt) {
    const GroupCounts c = group_counts(pred, gt);
    return scores_from(c, mat_iou_of(c));
}

Prediction predict(const Model& model, const SceneSample& sample, GroupingSource source) {
    NoGradGuard no_grad;
    const Recognition r = model.forward(sample, source);
    Prediction p;
    p.groups = r.groups;
    const std::size_t ci = r.scores.individual.dim(1);
    const std::size_t cs = r.scores.social.dim(1);
    const auto iv = r.scores.individual.data();
    const auto sv = r.scores.social.data();
    for (std::size_t i = 0; i < sample.individuals(); ++i) p.individual.push_back(positive_classes(iv.subspan(i * ci, ci)));
    for (std::size_t g = 0; g < r.groups.count; ++g) p.social.push_back(positive_classes(sv.subspan(g * cs, cs)));
    p.global = positive_classes(r.scores.global.data());
    return p;
}

Predictor model_predictor(const Model& model) {
    return [&model](const SceneSample& s, GroupingSource source) { return predict(model, s, source); };
}

SceneInstances score_scene(const Prediction& pred, const SceneSample& s) {
    if (pred.individual.size() != s.individuals()) throw ShapeError("prediction covers the wrong number of individuals");
    if (pred.social.size() != pred.groups.count) throw ShapeError("prediction needs one social label set per group");
    SceneInstances out;
    for (std::size_t i = 0; i < s.individuals(); ++i) {
        out.individual.push_back(instance_prf(pred.individual[i], s.individual_labels[i]));
    }
    const auto matches = match_groups(pred.groups.members(), s.groups.members());
    std::size_t matched = 0;
    for (const GroupMatch& m : matches) {
        if (m.iou <= 0) continue;
        ++matched;
        out.social.push_back(instance_prf(pred.social[m.pred], s.group_labels[m.gt]));
    }
    // Unmatched groups on either side score zero.
    out.social.insert(out.social.end(), s.groups.count - matched, Prf{});
    out.social.insert(out.social.end(), pred.groups.count - matched, Prf{});
    out.global = instance_prf(pred.global, s.global_labels);
    return out;
}

EvalResult evaluate(const Predictor& predictor, const std::vector<SceneSample>& data, GroupingSource source) {
    std::vector<Prf> individual, social, global;
    GroupCounts pooled;
    pooled.correct.assign(kAucThresholds, 0.0);
    double mat_total = 0;
    for (const SceneSample& s : data) {
        const Prediction p = predictor(s, source);
        const SceneInstances inst = score_scene(p, s);
        individual.insert(individual.end(), inst.individual.begin(), inst.individual.end());
        social.insert(social.end(), inst.social.begin(), inst.social.end());
        global.push_back(inst.global);
        const GroupCounts c = group_counts(p.groups, s.groups);
        for (std::size_t i = 0; i < kAucThresholds; ++i) pooled.correct[i] += c.correct[i];
        pooled.predicted += c.predicted;
        pooled.truth += c.truth;
        mat_total += mat_iou_of(c);
    }
    EvalResult r;
    r.scenes = data.size();
    const Prf pi = mean_of(individual), pp = mean_of(social), pg = mean_of(global);
    r.par = {pi.precision, pi.recall, pi.f1, pp.precision, pp.recall, pp.f1, pg.precision, pg.recall, pg.f1,
             (pi.f1 + pp.f1 + pg.f1) / 3.0};
    r.det = scores_from(pooled, data.empty() ? 0.0 : mat_total / static_cast<double>(data.size()));
    return r;
}

EvalResult evaluate(const Model& model, const std::vector<SceneSample>& data, GroupingSource source) {
    return evaluate(model_predictor(model), data, source);
}

const std::vector<std::string>& score_columns() {
    static const std::vector<std::string> cols{"P_i", "R_i", "F_i", "P_p", "R_p", "F_p",    "P_g",
                                               "R_g", "F_g", "F_a", "IoU@0.5", "IoU@AUC", "Mat.IoU"};
    return cols;
}

std::vector<double> score_values(const EvalResult& r) {
    const ParScores& p = r.par;
    return {p.P_i, p.R_i, p.F_i, p.P_p, p.R_p, p.F_p, p.P_g, p.R_g, p.F_g, p.F_a,
            r.det.iou_at_half, r.det.iou_auc, r.det.mat_iou};
}

std::string scores_csv_header() {
    std::string out;
    for (const auto& c : score_columns()) out += (out.empty() ? "" : ",") + c;
    return out;
}

std::string scores_csv_row(const EvalResult& r) {
    std::string out;
    char buf[32];
    for (double v : score_values(r)) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        out += (out.empty() ? "" : ",") + std::string(buf);
    }
    return out;
}

nlohmann::json scores_json(const EvalResult& r) {
    const ParScores& p = r.par;
    return {{"scenes", r.scenes},
            {"individual", {{"P_i", p.P_i}, {"R_i", p.R_i}, {"F_i", p.F_i}}},
            {"social", {{"P_p", p.P_p}, {"R_p", p.R_p}, {"F_p", p.F_p}}},
            {"global", {{"P_g", p.P_g}, {"R_g", p.R_g}, {"F_g", p.F_g}}},
            {"F_a", p.F_a},
            {"group_detection", {{"IoU@0.5", r.det.iou_at_half}, {"IoU@AUC", r.det.iou_auc}, {"Mat.IoU", r.det.mat_iou}}}};
}

}  // namespace panoact
