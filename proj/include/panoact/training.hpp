// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Losses, learning-rate schedule and the training loop.
#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <json.hpp>

#include "panoact/adam.hpp"
#include "panoact/evaluation.hpp"
#include "panoact/model.hpp"

namespace panoact {

struct LossWeights {
    double individual = 1, relation = 1, aux = 1;
    double social = 3, global = 2, count = 5;

    void validate() const;
};

struct TrainConfig {
    std::size_t epochs = 60;
    std::size_t warmup_epochs = 15;
    double lr = 4e-5;
    double weight_decay = 1e-2;
    std::size_t batch = 4;
    std::uint64_t seed = 0;

    void validate() const;
};

nlohmann::json to_json(const LossWeights& w);
LossWeights loss_weights_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

constexpr double kScoreClip = 1e-7;

/// Mean binary cross-entropy; scores clipped to [1e-7, 1 - 1e-7].
Tensor bce_loss(const Tensor& scores, const Tensor& targets);
/// BCE between Rs and the co-membership matrix over off-diagonal entries.
Tensor relation_loss(const Tensor& rs, const GroupAssignment& groups);
/// (n_g - gt_count / N)^2.
Tensor count_loss(const Tensor& fraction, std::size_t gt_count, std::size_t individuals);

/// Multi-hot [rows, classes] targets.
Tensor multi_hot(const std::vector<LabelSet>& labels, std::size_t classes);

struct LossParts {
    Tensor total;
    double individual = 0, relation = 0, aux = 0, social = 0, global = 0, count = 0;
};

/// Weighted sum of the six terms.
Tensor combine_losses(const std::vector<Tensor>& parts, const LossWeights& w);

/// Full loss of one scene with teacher-forced (ground-truth) grouping.
LossParts scene_loss(const Model& model, const SceneSample& sample, const LossWeights& weights);

/// Linear ramp 0 -> lr over warmup_steps, then constant.
double lr_schedule(std::size_t step, std::size_t warmup_steps, double lr);

struct EpochLog {
    std::size_t epoch = 0;
    std::uint64_t step = 0;
    double lr = 0;
    double loss = 0;
    double individual = 0, relation = 0, aux = 0, social = 0, global = 0, count = 0;
    EvalResult eval;
};

nlohmann::json to_json(const EpochLog& log);

struct TrainOptions {
    std::filesystem::path run_dir;  // empty: no files
    /// Extra meta stored in every checkpoint (e.g. the resolved run config).
    nlohmann::json meta = nlohmann::json::object();
    std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
    std::vector<EpochLog> log;
    std::vector<double> step_losses;  // mean loss of every optimizer step
    double best_fa = -1;
    std::size_t best_epoch = 0;
};

/// Training state written to checkpoints: parameters, Adam moments and step.
Checkpoint training_checkpoint(const Model& model, const AdamState& opt, const nlohmann::json& meta);
/// Restores parameters and optimizer state from a training checkpoint.
void restore_training(const Checkpoint& ckpt, Model& model, AdamState& opt);

/// Trains from opt.steps() onward. Validation (predicted grouping) picks the
/// best epoch; with run_dir set, appends log.jsonl and keeps best.ckpt and
/// last.ckpt. Throws NumericError on a non-finite loss.
TrainResult train(Model& model, AdamState& opt, const std::vector<SceneSample>& train_set,
                  const std::vector<SceneSample>& val_set, const TrainConfig& config, const LossWeights& weights,
                  const TrainOptions& options = {});

}  // namespace panoact
