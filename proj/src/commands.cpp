// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/commands.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace panoact {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed: " + path.string());
}

void echo_config(const RunConfig& config, const fs::path& dir) {
    fs::create_directories(dir);
    write_text(dir / "config.json", to_json(config).dump(2) + "\n");
}

std::string cell_dir(const std::string& cell) {
    std::string out = cell;
    for (char& c : out) {
        if (c == '=') c = '-';
        if (c == ',') c = '_';
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

void cmd_gen(const RunConfig& config, std::ostream& log) {
    try {
        fs::create_directories(config.data_dir);
    } catch (const fs::filesystem_error& e) {
        throw DataError("cannot create data directory " + config.data_dir.string() + ": " + e.what());
    }
    echo_config(config, config.data_dir);
    DatasetConfig train_cfg = config.data;
    DatasetConfig val_cfg = config.data;
    val_cfg.scenes = config.val_scenes;
    const json spec = to_json(config.data);
    const auto train = generate_dataset(train_cfg, 0);
    write_dataset(train, config.data_dir / "train.jsonl", spec);
    const auto val = generate_dataset(val_cfg, 1);
    write_dataset(val, config.data_dir / "val.jsonl", spec);
    log << "wrote " << train.size() << " training and " << val.size() << " validation scenes to "
        << config.data_dir.string() << "\n";
}

std::pair<Dataset, Dataset> load_splits(const RunConfig& config) {
    const fs::path train = config.data_dir / "train.jsonl";
    const fs::path val = config.data_dir / "val.jsonl";
    for (const auto& p : {train, val}) {
        if (!fs::exists(p)) throw DataError("missing dataset " + p.string() + " (run `gen` first)");
    }
    return {read_dataset(train), read_dataset(val)};
}

void write_scores(const fs::path& dir, const EvalResult& r, const json& extra) {
    fs::create_directories(dir);
    write_text(dir / "scores.csv", scores_csv_header() + "\n" + scores_csv_row(r) + "\n");
    json j = scores_json(r);
    for (const auto& [k, v] : extra.items()) j[k] = v;
    write_text(dir / "scores.json", j.dump(2) + "\n");
}

TrainOutcome cmd_train(const RunConfig& config, const std::optional<fs::path>& resume, std::ostream& log) {
    echo_config(config, config.out);
    const auto [train_set, val_set] = load_splits(config);
    Model model(config.model);
    AdamConfig adam;
    adam.lr = config.train.lr;
    adam.weight_decay = config.train.weight_decay;
    AdamState opt(model.params(), adam);

    TrainOptions options;
    options.run_dir = config.out;
    options.meta["run"] = to_json(config);
    if (resume) {
        if (!fs::exists(*resume)) throw DataError("missing checkpoint " + resume->string());
        const Checkpoint ckpt = read_checkpoint(*resume);
        if (ckpt.meta.value("model", json()) != to_json(config.model)) {
            throw DataError("checkpoint " + resume->string() + " was trained with a different model config");
        }
        restore_training(ckpt, model, opt);
        for (const char* key : {"best_fa", "best_epoch"}) {
            if (ckpt.meta.contains(key)) options.meta[key] = ckpt.meta[key];
        }
        log << "resuming at step " << opt.steps() << "\n";
    }
    options.on_epoch = [&](const EpochLog& e) {
        log << "epoch " << e.epoch << " step " << e.step << " loss " << e.loss << " F_a " << e.eval.par.F_a
            << " Mat.IoU " << e.eval.det.mat_iou << "\n";
    };

    TrainOutcome outcome;
    outcome.result = train(model, opt, train_set.samples, val_set.samples, config.train, config.loss, options);
    const fs::path best = config.out / "best.ckpt";
    outcome.scores = cmd_eval(config, best, log);
    return outcome;
}

EvalResult cmd_eval(const RunConfig& config, const fs::path& checkpoint, std::ostream& log) {
    if (!fs::exists(checkpoint)) throw DataError("missing checkpoint " + checkpoint.string());
    const Model model = Model::from_checkpoint(read_checkpoint(checkpoint));
    fs::create_directories(config.out);
    if (!fs::exists(config.out / "config.json")) echo_config(config, config.out);
    const fs::path val = config.data_dir / "val.jsonl";
    if (!fs::exists(val)) throw DataError("missing dataset " + val.string() + " (run `gen` first)");
    const Dataset data = read_dataset(val);
    const EvalResult r = evaluate(model, data.samples, config.grouping);
    write_scores(config.out, r, {{"grouping", to_string(config.grouping)}, {"checkpoint", checkpoint.string()}});
    log << scores_csv_header() << "\n" << scores_csv_row(r) << "\n";
    return r;
}

std::vector<AblationCell> parse_grid(const std::string& grid, const RunConfig& base) {
    std::vector<AblationCell> cells{{"", base}};
    const auto axes = split(grid, ';');
    if (axes.empty()) throw ConfigError("empty ablation grid");
    for (const auto& axis : axes) {
        const auto eq = axis.find('=');
        if (eq == std::string::npos) throw ConfigError("ablation axis '" + axis + "' needs the form name=v1,v2");
        const std::string name = axis.substr(0, eq);
        const auto values = split(axis.substr(eq + 1), ',');
        if (values.empty()) throw ConfigError("ablation axis '" + name + "' has no values");
        std::vector<AblationCell> next;
        for (const auto& cell : cells) {
            for (const auto& v : values) {
                AblationCell c = cell;
                if (name == "ppe") {
                    c.config.model.ppe = parse_ppe(v);
                } else if (name == "proximity") {
                    c.config.model.proximity = parse_proximity(v);
                } else if (name == "relation") {
                    c.config.model.relation = parse_relation(v);
                } else if (name == "structure") {
                    c.config.model.structure = parse_structure(v);
                } else {
                    throw ConfigError("unknown ablation axis '" + name +
                                      "' (expected ppe, proximity, relation or structure)");
                }
                c.name += (c.name.empty() ? "" : ",") + name + "=" + v;
                next.push_back(std::move(c));
            }
        }
        cells = std::move(next);
    }
    for (auto& c : cells) c.config.out = base.out / cell_dir(c.name);
    return cells;
}

std::vector<AblationRow> cmd_ablate(const RunConfig& config, const std::string& grid, std::ostream& log) {
    const auto cells = parse_grid(grid, config);
    echo_config(config, config.out);
    std::vector<AblationRow> rows;
    for (const auto& cell : cells) {
        log << "== cell " << cell.name << "\n";
        rows.push_back({cell.name, cmd_train(cell.config, std::nullopt, log).scores});
    }
    std::string csv = "cell," + scores_csv_header() + "\n";
    json j = json::array();
    for (const auto& row : rows) {
        csv += row.cell + "," + scores_csv_row(row.scores) + "\n";
        json entry = scores_json(row.scores);
        entry["cell"] = row.cell;
        j.push_back(entry);
    }
    write_text(config.out / "ablation.csv", csv);
    write_text(config.out / "ablation.json", j.dump(2) + "\n");
    return rows;
}

void cmd_inspect(const fs::path& path, std::ostream& out) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string first;
    std::getline(in, first);
    json head;
    try {
        head = json::parse(first);
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ":1: not a dataset or checkpoint manifest");
    }
    const std::string format = head.value("format", "");
    if (format == "panoact-dataset") {
        const Dataset ds = read_dataset(path);
        std::size_t people = 0, groups = 0, distractors = 0;
        std::map<std::string, std::size_t> flavors;
        for (const auto& s : ds.samples) {
            people += s.individuals();
            groups += s.groups.count;
            for (bool d : s.distractor) distractors += d ? 1 : 0;
            ++flavors[to_string(s.flavor)];
        }
        const double n = ds.samples.empty() ? 1.0 : static_cast<double>(ds.samples.size());
        out << "dataset " << path.string() << "\n"
            << "  scenes: " << ds.samples.size() << "\n"
            << "  mean individuals: " << static_cast<double>(people) / n << "\n"
            << "  mean groups: " << static_cast<double>(groups) / n << "\n"
            << "  distractors: " << distractors << "\n";
        for (const auto& [f, c] : flavors) out << "  flavor " << f << ": " << c << "\n";
        if (!ds.samples.empty()) {
            const auto& s = ds.samples.front();
            out << "  frames: " << s.frames << ", feature_dim: " << s.feature_dim << ", crop: " << s.crop_h << "x"
                << s.crop_w << ", grid: " << s.grid_h << "x" << s.grid_w << "\n";
        }
    } else if (format == "panoact-checkpoint") {
        const Checkpoint ckpt = read_checkpoint(path);
        std::size_t params = 0, scalars = 0;
        for (const auto& [name, t] : ckpt.tensors) {
            if (name.rfind("adam.", 0) == 0) continue;
            ++params;
            scalars += t.numel();
        }
        out << "checkpoint " << path.string() << "\n"
            << "  parameter tensors: " << params << " (" << scalars << " scalars)\n";
        if (ckpt.meta.contains("adam")) out << "  optimizer steps: " << ckpt.meta["adam"].value("steps", 0) << "\n";
        if (ckpt.meta.contains("epoch")) out << "  epoch: " << ckpt.meta["epoch"] << "\n";
        if (ckpt.meta.contains("best_fa")) out << "  best F_a: " << ckpt.meta["best_fa"] << "\n";
        if (ckpt.meta.contains("model")) out << "  model: " << ckpt.meta["model"].dump() << "\n";
    } else {
        throw DataError(path.string() + ":1: unknown file format '" + format + "'");
    }
}

}  // namespace panoact
