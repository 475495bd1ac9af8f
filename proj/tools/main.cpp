// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// panoact: generate synthetic panoramic scenes, train and evaluate the
// recognizer, run ablation grids, inspect files.
#include <omp.h>

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "panoact/commands.hpp"
#include "panoact/kernels.hpp"

namespace {

using namespace panoact;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string ppe, proximity, relation, structure, grouping, out, data;
    int threads = 1;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON run config (nested or dotted keys)")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "base seed for data, initialization and shuffling");
    sub->add_option("--ppe", f.ppe, "panoramic positional embedding")
        ->check(CLI::IsMember({"off", "spatial", "temporal", "both"}));
    sub->add_option("--proximity", f.proximity, "proximity metric for Rp")
        ->check(CLI::IsMember({"euclid_s", "euclid_st", "giou_s", "tgiou"}));
    sub->add_option("--relation", f.relation, "relation matrix used for grouping")
        ->check(CLI::IsMember({"none", "rs_only", "rp_only", "both"}));
    sub->add_option("--structure", f.structure, "activity transformer structure")
        ->check(CLI::IsMember({"dpatr", "parallel", "hierarchical", "reverse"}));
    sub->add_option("--grouping", f.grouping, "grouping source at evaluation")
        ->check(CLI::IsMember({"predicted", "gt_groups", "gt_count"}));
    sub->add_option("--out", f.out, "run directory");
    sub->add_option("--data", f.data, "dataset directory (train.jsonl, val.jsonl)");
    sub->add_option("--threads", f.threads, "OpenMP threads; above 1 enables the parallel kernels")
        ->check(CLI::PositiveNumber);
}

RunConfig resolve(const Flags& f) {
    RunConfig c = f.config.empty() ? RunConfig() : load_run_config(f.config);
    if (f.seed) c.seed = *f.seed;
    if (!f.ppe.empty()) c.model.ppe = parse_ppe(f.ppe);
    if (!f.proximity.empty()) c.model.proximity = parse_proximity(f.proximity);
    if (!f.relation.empty()) c.model.relation = parse_relation(f.relation);
    if (!f.structure.empty()) c.model.structure = parse_structure(f.structure);
    if (!f.grouping.empty()) c.grouping = parse_grouping(f.grouping);
    if (!f.out.empty()) c.out = f.out;
    if (!f.data.empty()) c.data_dir = f.data;
    c.resolve();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Panoramic activity recognition on synthetic scenes"};
    app.require_subcommand(1, 1);
    Flags f;
    std::string resume, checkpoint, grid, target;

    auto* gen = app.add_subcommand("gen", "generate train/val datasets");
    auto* train = app.add_subcommand("train", "train a model and score its best checkpoint");
    auto* eval = app.add_subcommand("eval", "score a checkpoint on the validation split");
    auto* ablate = app.add_subcommand("ablate", "train and score every cell of an ablation grid");
    auto* inspect = app.add_subcommand("inspect", "summarize a dataset or checkpoint file");
    for (auto* sub : {gen, train, eval, ablate}) add_common(sub, f);
    train->add_option("--resume", resume, "training checkpoint to continue from")->check(CLI::ExistingFile);
    eval->add_option("--checkpoint", checkpoint, "checkpoint to score (default <out>/best.ckpt)");
    ablate->add_option("--grid", grid, "axes such as \"proximity=giou_s,tgiou;relation=rs_only,both\"")->required();
    inspect->add_option("path", target, "dataset .jsonl or checkpoint file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* shown = &app;
        for (auto* sub : {gen, train, eval, ablate, inspect}) {
            if (argc > 1 && sub->get_name() == argv[1]) shown = sub;
        }
        std::cerr << shown->help();
        return kUsage;
    }

    try {
        if (f.threads > 1) {
            omp_set_num_threads(f.threads);
            kernels::set_parallel(true);
        }
        if (*inspect) {
            cmd_inspect(target, std::cout);
            return kOk;
        }
        const RunConfig config = resolve(f);
        std::cout << "config: " << to_json(config).dump() << "\n";
        if (*gen) {
            cmd_gen(config, std::cout);
        } else if (*train) {
            cmd_train(config, resume.empty() ? std::nullopt : std::optional<std::filesystem::path>(resume), std::cout);
        } else if (*eval) {
            cmd_eval(config, checkpoint.empty() ? config.out / "best.ckpt" : std::filesystem::path(checkpoint),
                     std::cout);
        } else if (*ablate) {
            cmd_ablate(config, grid, std::cout);
        }
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    }
}
