// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
// Subcommand bodies behind the command-line tool. Each writes its resolved
// config and fixed-name outputs into the run directory.
#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "panoact/config.hpp"

namespace panoact {

/// Writes <data_dir>/train.jsonl and val.jsonl (+ .bin) from disjoint seed streams.
void cmd_gen(const RunConfig& config, std::ostream& log);

/// Loads both splits from data_dir; throws DataError when they are missing.
std::pair<Dataset, Dataset> load_splits(const RunConfig& config);

struct TrainOutcome {
    TrainResult result;
    EvalResult scores;  // best checkpoint on the validation split
};

/// Trains into config.out (config.json, log.jsonl, best.ckpt, last.ckpt) and
/// scores the best checkpoint (scores.csv, scores.json).
TrainOutcome cmd_train(const RunConfig& config, const std::optional<std::filesystem::path>& resume,
                       std::ostream& log);

/// Scores a checkpoint on the validation split with config.grouping.
EvalResult cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoint, std::ostream& log);

struct AblationCell {
    std::string name;  // "proximity=tgiou,relation=both"
    RunConfig config;
};

/// Grid syntax: "axis=v1,v2;axis=v3" over ppe, proximity, relation and
/// structure. The cells are the cartesian product, in the order given.
std::vector<AblationCell> parse_grid(const std::string& grid, const RunConfig& base);

struct AblationRow {
    std::string cell;
    EvalResult scores;
};

/// Trains and scores every cell under config.out/<cell>; writes
/// config.out/ablation.csv (cell column plus the score columns) and ablation.json.
std::vector<AblationRow> cmd_ablate(const RunConfig& config, const std::string& grid, std::ostream& log);

/// Summary of a dataset (.jsonl) or checkpoint file.
void cmd_inspect(const std::filesystem::path& path, std::ostream& out);

void write_scores(const std::filesystem::path& dir, const EvalResult& r, const nlohmann::json& extra);

}  // namespace panoact
