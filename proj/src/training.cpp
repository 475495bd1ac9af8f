// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/training.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace panoact {

namespace {

bool finite(double x) { return std::isfinite(x); }

std::string describe(const LossParts& p) {
    return "idv=" + std::to_string(p.individual) + " R=" + std::to_string(p.relation) +
           " aux=" + std::to_string(p.aux) + " sg=" + std::to_string(p.social) + " glb=" + std::to_string(p.global) +
           " n=" + std::to_string(p.count);
}

}  // namespace

void LossWeights::validate() const {
    for (double w : {individual, relation, aux, social, global, count}) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("loss weights must be finite and non-negative");
    }
}

void TrainConfig::validate() const {
    if (warmup_epochs > epochs) throw ConfigError("warmup_epochs must not exceed epochs");
    if (batch == 0) throw ConfigError("batch must be positive");
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be finite and non-negative");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) throw ConfigError("weight_decay must be non-negative");
}

nlohmann::json to_json(const LossWeights& w) {
    return {{"individual", w.individual}, {"relation", w.relation}, {"aux", w.aux},
            {"social", w.social},         {"global", w.global},     {"count", w.count}};
}

LossWeights loss_weights_from_json(const nlohmann::json& j) {
    LossWeights w;
    w.individual = j.value("individual", w.individual);
    w.relation = j.value("relation", w.relation);
    w.aux = j.value("aux", w.aux);
    w.social = j.value("social", w.social);
    w.global = j.value("global", w.global);
    w.count = j.value("count", w.count);
    return w;
}

nlohmann::json to_json(const TrainConfig& c) {
    return {{"epochs", c.epochs}, {"warmup_epochs", c.warmup_epochs}, {"lr", c.lr},
            {"weight_decay", c.weight_decay}, {"batch", c.batch}, {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.epochs = j.value("epochs", c.epochs);
    c.warmup_epochs = j.value("warmup_epochs", c.warmup_epochs);
    c.lr = j.value("lr", c.lr);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.batch = j.value("batch", c.batch);
    c.seed = j.value("seed", c.seed);
    return c;
}

Tensor bce_loss(const Tensor& scores, const Tensor& targets) {
    if (scores.shape() != targets.shape()) {
        throw ShapeError("bce_loss: scores " + to_string(scores.shape()) + " vs targets " + to_string(targets.shape()));
    }
    const Tensor s = clamp(scores, kScoreClip, 1.0 - kScoreClip);
    const Tensor pos = mul(targets, log(s));
    const Tensor negs = mul(add_scalar(neg(targets), 1.0), log(add_scalar(neg(s), 1.0)));
    return neg(mean(add(pos, negs)));
}

Tensor relation_loss(const Tensor& rs, const GroupAssignment& groups) {
    const std::size_t n = groups.individuals();
    if (rs.shape() != Shape{n, n}) throw ShapeError("relation_loss: Rs must be [N,N], got " + to_string(rs.shape()));
    std::vector<double> target(n * n, 0.0), mask(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            mask[i * n + j] = 1.0;
            target[i * n + j] = groups.labels[i] == groups.labels[j] ? 1.0 : 0.0;
        }
    }
    const Tensor y = Tensor::from({n, n}, std::move(target));
    const Tensor m = Tensor::from({n, n}, std::move(mask));
    const Tensor s = clamp(rs, kScoreClip, 1.0 - kScoreClip);
    const Tensor elem = add(mul(y, log(s)), mul(add_scalar(neg(y), 1.0), log(add_scalar(neg(s), 1.0))));
    const double pairs = static_cast<double>(n * (n - 1));
    // The mask keeps a gradient path even when N = 1.
    return scale(sum(mul(m, elem)), -1.0 / std::max(pairs, 1.0));
}

Tensor count_loss(const Tensor& fraction, std::size_t gt_count, std::size_t individuals) {
    if (fraction.numel() != 1) throw ShapeError("count_loss: prediction must hold one value");
    if (individuals == 0) throw ConfigError("count_loss: no individuals");
    const double target = static_cast<double>(gt_count) / static_cast<double>(individuals);
    return sum(square(add_scalar(fraction, -target)));
}

Tensor multi_hot(const std::vector<LabelSet>& labels, std::size_t classes) {
    std::vector<double> v(labels.size() * classes, 0.0);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        for (std::size_t c : labels[r]) {
            if (c >= classes) throw DataError("label " + std::to_string(c) + " out of range " + std::to_string(classes));
            v[r * classes + c] = 1.0;
        }
    }
    return Tensor::from({labels.size(), classes}, std::move(v));
}

Tensor combine_losses(const std::vector<Tensor>& parts, const LossWeights& w) {
    if (parts.size() != 6) throw ShapeError("combine_losses expects six terms");
    const double weights[6] = {w.individual, w.relation, w.aux, w.social, w.global, w.count};
    Tensor total = scale(parts[0], weights[0]);
    for (std::size_t k = 1; k < 6; ++k) total = add(total, scale(parts[k], weights[k]));
    return total;
}

LossParts scene_loss(const Model& model, const SceneSample& s, const LossWeights& weights) {
    const Recognition r = model.forward(s, GroupingSource::GtGroups);
    const ClassCounts& c = model.config().classes;
    const Tensor idv_targets = multi_hot(s.individual_labels, c.individual);
    std::vector<Tensor> parts{
        bce_loss(r.scores.individual, idv_targets),
        relation_loss(r.encoded.rs, s.groups),
        bce_loss(r.encoded.aux, idv_targets),
        bce_loss(r.scores.social, multi_hot(s.group_labels, c.social)),
        bce_loss(r.scores.global, multi_hot({s.global_labels}, c.global)),
        count_loss(r.encoded.count_fraction, s.groups.count, s.individuals()),
    };
    LossParts out;
    out.individual = parts[0].item();
    out.relation = parts[1].item();
    out.aux = parts[2].item();
    out.social = parts[3].item();
    out.global = parts[4].item();
    out.count = parts[5].item();
    out.total = combine_losses(parts, weights);
    return out;
}

double lr_schedule(std::size_t step, std::size_t warmup_steps, double lr) {
    if (step >= warmup_steps) return lr;
    return lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
}

nlohmann::json to_json(const EpochLog& e) {
    const ParScores& p = e.eval.par;
    return {{"epoch", e.epoch},
            {"step", e.step},
            {"lr", e.lr},
            {"loss", e.loss},
            {"loss_idv", e.individual},
            {"loss_R", e.relation},
            {"loss_aux", e.aux},
            {"loss_sg", e.social},
            {"loss_glb", e.global},
            {"loss_n", e.count},
            {"F_i", p.F_i},
            {"F_p", p.F_p},
            {"F_g", p.F_g},
            {"F_a", p.F_a},
            {"IoU@0.5", e.eval.det.iou_at_half},
            {"Mat.IoU", e.eval.det.mat_iou}};
}

Checkpoint training_checkpoint(const Model& model, const AdamState& opt, const nlohmann::json& meta) {
    Checkpoint ckpt = model.to_checkpoint();
    for (const auto& [k, v] : meta.items()) ckpt.meta[k] = v;
    const AdamConfig& c = opt.config();
    ckpt.meta["adam"] = {{"steps", opt.steps()}, {"lr", c.lr},   {"beta1", c.beta1},
                         {"beta2", c.beta2},     {"eps", c.eps}, {"weight_decay", c.weight_decay}};
    const auto& items = model.params().items();
    for (std::size_t k = 0; k < opt.first_moments().size(); ++k) {
        ckpt.tensors.emplace_back("adam.m." + items[k].first, opt.first_moments()[k].clone());
        ckpt.tensors.emplace_back("adam.v." + items[k].first, opt.second_moments()[k].clone());
    }
    return ckpt;
}

void restore_training(const Checkpoint& ckpt, Model& model, AdamState& opt) {
    model.load(ckpt);
    if (!ckpt.meta.contains("adam")) return;
    const auto& a = ckpt.meta.at("adam");
    opt.set_steps(a.at("steps").get<std::uint64_t>());
    const auto& items = model.params().items();
    for (std::size_t k = 0; k < items.size(); ++k) {
        const Tensor& m = ckpt.find("adam.m." + items[k].first);
        const Tensor& v = ckpt.find("adam.v." + items[k].first);
        if (m.shape() != items[k].second.shape() || v.shape() != items[k].second.shape()) {
            throw DataError("optimizer state for '" + items[k].first + "' has the wrong shape");
        }
        std::copy(m.data().begin(), m.data().end(), opt.first_moments()[k].mutable_data().begin());
        std::copy(v.data().begin(), v.data().end(), opt.second_moments()[k].mutable_data().begin());
    }
}

TrainResult train(Model& model, AdamState& opt, const std::vector<SceneSample>& train_set,
                  const std::vector<SceneSample>& val_set, const TrainConfig& config, const LossWeights& weights,
                  const TrainOptions& options) {
    config.validate();
    weights.validate();
    if (train_set.empty()) throw DataError("training set is empty");
    for (const auto& s : train_set) model.check_sample(s);
    for (const auto& s : val_set) model.check_sample(s);
    const auto& monitor = val_set.empty() ? train_set : val_set;

    const std::size_t n = train_set.size();
    const std::size_t per_epoch = (n + config.batch - 1) / config.batch;
    const std::size_t warmup = config.warmup_epochs * per_epoch;
    opt.config().weight_decay = config.weight_decay;

    TrainResult result;
    nlohmann::json meta = options.meta;
    const bool resumed = opt.steps() > 0;
    if (resumed && meta.contains("best_fa")) {
        result.best_fa = meta.at("best_fa").get<double>();
        result.best_epoch = meta.value("best_epoch", std::size_t{0});
    }
    std::ofstream log_out;
    if (!options.run_dir.empty()) {
        std::filesystem::create_directories(options.run_dir);
        log_out.open(options.run_dir / "log.jsonl", resumed ? std::ios::app : std::ios::trunc);
        if (!log_out) throw DataError("cannot write " + (options.run_dir / "log.jsonl").string());
    }

    const std::size_t first_epoch = static_cast<std::size_t>(opt.steps() / per_epoch);
    std::size_t skip = static_cast<std::size_t>(opt.steps() % per_epoch);
    for (std::size_t epoch = first_epoch; epoch < config.epochs; ++epoch) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(config.seed * 0x9E3779B97F4A7C15ULL + epoch);
        std::shuffle(order.begin(), order.end(), rng);

        EpochLog log;
        log.epoch = epoch;
        std::size_t seen = 0;
        for (std::size_t b = skip; b < per_epoch; ++b) {
            const std::size_t lo = b * config.batch, hi = std::min(n, lo + config.batch);
            const double inv = 1.0 / static_cast<double>(hi - lo);
            opt.config().lr = lr_schedule(static_cast<std::size_t>(opt.steps()), warmup, config.lr);
            model.params().zero_grad();
            double step_loss = 0;
            for (std::size_t k = lo; k < hi; ++k) {
                const SceneSample& s = train_set[order[k]];
                LossParts parts = scene_loss(model, s, weights);
                const double value = parts.total.item();
                if (!finite(value)) {
                    throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                                       std::to_string(opt.steps()) + ", scene seed " + std::to_string(s.seed) + " (" +
                                       describe(parts) + ")");
                }
                scale(parts.total, inv).backward();
                step_loss += value * inv;
                log.loss += value;
                log.individual += parts.individual;
                log.relation += parts.relation;
                log.aux += parts.aux;
                log.social += parts.social;
                log.global += parts.global;
                log.count += parts.count;
                ++seen;
            }
            opt.step(model.params());
            result.step_losses.push_back(step_loss);
        }
        skip = 0;
        if (seen > 0) {
            const double inv = 1.0 / static_cast<double>(seen);
            for (double* v : {&log.loss, &log.individual, &log.relation, &log.aux, &log.social, &log.global, &log.count}) {
                *v *= inv;
            }
        }
        log.step = opt.steps();
        log.lr = opt.config().lr;
        log.eval = evaluate(model, monitor, GroupingSource::Predicted);
        result.log.push_back(log);
        if (log_out) log_out << to_json(log).dump() << '\n' << std::flush;
        if (options.on_epoch) options.on_epoch(log);

        const bool best = log.eval.par.F_a > result.best_fa;
        if (best) {
            result.best_fa = log.eval.par.F_a;
            result.best_epoch = epoch;
        }
        if (!options.run_dir.empty()) {
            meta["epoch"] = epoch;
            meta["best_fa"] = result.best_fa;
            meta["best_epoch"] = result.best_epoch;
            const Checkpoint ckpt = training_checkpoint(model, opt, meta);
            if (best) write_checkpoint(options.run_dir / "best.ckpt", ckpt);
            write_checkpoint(options.run_dir / "last.ckpt", ckpt);
        }
    }
    return result;
}

}  // namespace panoact
