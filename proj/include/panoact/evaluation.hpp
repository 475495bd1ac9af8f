// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Recognition and group detection scores.
//
// Activity scores are per-instance precision / recall / F1 averaged over
// instances: persons, matched groups, scenes. Groups are matched one-to-one by
// the Hungarian method on member-set IoU.
#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "panoact/model.hpp"

namespace panoact {

using LabelSet = std::vector<std::size_t>;

struct Prf {
    double precision = 0, recall = 0, f1 = 0;
};

/// Per-instance scores of one prediction.
Prf instance_prf(const LabelSet& pred, const LabelSet& gt);
Prf multilabel_prf(const std::vector<LabelSet>& pred, const std::vector<LabelSet>& gt);

double group_set_iou(const LabelSet& a, const LabelSet& b);

struct GroupMatch {
    std::size_t pred = 0, gt = 0;
    double iou = 0;
};

/// Maximum-total-IoU one-to-one matching, returned ordered by gt index. Ties
/// go to the lexicographically smallest (gt, pred) assignment.
/// Every gt group is matched when there are enough predicted groups; pairs
/// may have zero IoU.
std::vector<GroupMatch> match_groups(const std::vector<LabelSet>& pred, const std::vector<LabelSet>& gt);

/// Square assignment minimizing total cost; returns column per row.
std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t n);

constexpr std::size_t kAucThresholds = 11;  // 0.50, 0.55, ..., 1.00
double auc_threshold(std::size_t i);

struct GroupCounts {
    std::vector<double> correct;  // per threshold, kAucThresholds entries; index 0 is 0.5
    double predicted = 0, truth = 0;
    double mat_intersection = 0, mat_union = 0;
};

GroupCounts group_counts(const GroupAssignment& pred, const GroupAssignment& gt);

struct GroupDetScores {
    double iou_at_half = 0, iou_auc = 0, mat_iou = 0;
};

GroupDetScores group_detection_scores(const GroupAssignment& pred, const GroupAssignment& gt);

struct ParScores {
    double P_i = 0, R_i = 0, F_i = 0;
    double P_p = 0, R_p = 0, F_p = 0;
    double P_g = 0, R_g = 0, F_g = 0;
    double F_a = 0;
};

struct Prediction {
    GroupAssignment groups;
    std::vector<LabelSet> individual;  // per individual
    std::vector<LabelSet> social;      // per predicted group
    LabelSet global;
};

using Predictor = std::function<Prediction(const SceneSample&, GroupingSource)>;

Predictor model_predictor(const Model& model);
Prediction predict(const Model& model, const SceneSample& sample, GroupingSource source);

/// Instances for one scene, appended to running lists.
struct SceneInstances {
    std::vector<Prf> individual, social;
    Prf global;
};

SceneInstances score_scene(const Prediction& pred, const SceneSample& sample);

struct EvalResult {
    ParScores par;
    GroupDetScores det;
    std::size_t scenes = 0;
};

/// Dataset scores: activity instances pooled over scenes; IoU@k from pooled
/// counts; Mat.IoU is the mean of per-scene values.
EvalResult evaluate(const Predictor& predictor, const std::vector<SceneSample>& data, GroupingSource source);
EvalResult evaluate(const Model& model, const std::vector<SceneSample>& data, GroupingSource source);

const std::vector<std::string>& score_columns();
std::vector<double> score_values(const EvalResult& r);
std::string scores_csv_header();
std::string scores_csv_row(const EvalResult& r);
nlohmann::json scores_json(const EvalResult& r);

}  // namespace panoact
