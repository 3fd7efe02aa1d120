// Copyright 2026 The qaoa-init Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Command-line driver for model training and benchmarking.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qaoa/bench.hpp"
#include "qaoa/checkpoint.hpp"
#include "qaoa/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qaoa;

namespace {

constexpr const char *kOutputEnv = "QAOA_INIT_OUTPUT_DIR";

json read_json_file(const fs::path &path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return json::parse(is);
    } catch (const json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

/// Flag beats environment beats config file.
fs::path resolve_output(const std::optional<std::string> &flag,
                        const fs::path &from_config) {
    if (flag) {
        return *flag;
    }
    if (const char *env = std::getenv(kOutputEnv); env && *env) {
        return env;
    }
    return from_config;
}

struct TrainFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> graphs;
    std::optional<int> epochs;
    std::optional<int> restarts;
    std::optional<std::string> output;
    bool dump = false;
};

void add_train_flags(CLI::App &cmd, TrainFlags &f, bool with_epochs,
                     bool with_restarts) {
    cmd.add_option("-c,--config", f.config, "training config (JSON)")
        ->check(CLI::ExistingFile);
    cmd.add_option("--seed", f.seed, "master seed");
    cmd.add_option("--graphs", f.graphs, "number of training graphs");
    if (with_epochs) {
        cmd.add_option("--epochs", f.epochs, "training epochs");
    }
    if (with_restarts) {
        cmd.add_option("--restarts", f.restarts, "depth-2 searches per graph");
    }
    cmd.add_option("-o,--output-dir", f.output,
                   std::string("model directory (env ") + kOutputEnv + ")");
    cmd.add_flag("--print-config", f.dump, "print the effective config and exit");
}

TrainConfig train_config(const TrainFlags &f, std::string_view stage) {
    TrainConfig cfg;
    if (!f.config.empty()) {
        cfg = train_config_from_json(read_json_file(f.config));
    }
    if (f.seed) cfg.seed = *f.seed;
    if (f.graphs) cfg.n_graphs = *f.graphs;
    if (f.epochs) {
        (stage == "gru" ? cfg.gru.epochs : cfg.cnn.epochs) = *f.epochs;
    }
    if (f.restarts) cfg.labels.restarts = *f.restarts;
    cfg.output_dir = resolve_output(f.output, cfg.output_dir);
    cfg.validate();
    return cfg;
}

GruWeights load_gru(const fs::path &path, std::size_t hidden) {
    if (!fs::exists(path)) {
        throw ConfigError("GRU checkpoint " + path.string() +
                          " not found; run train-gru first");
    }
    return GruWeights::from_checkpoint(load_checkpoint(path), hidden);
}

int cmd_train_gru(const TrainFlags &f) {
    const auto cfg = train_config(f, "gru");
    if (f.dump) {
        std::cout << to_json(cfg).dump(2) << "\n";
        return 0;
    }
    const auto result = train_gru_stage(cfg);
    fs::create_directories(cfg.output_dir);
    save_checkpoint(result.weights.to_checkpoint(checkpoint_metadata(cfg, "gru")),
                    cfg.output_dir / "gru.ckpt.json");
    write_loss_csv(result.loss_history, cfg.output_dir / "gru_loss.csv");
    std::cout << "GRU trained for " << result.loss_history.size()
              << " epochs, final loss " << result.loss_history.back()
              << "; wrote " << (cfg.output_dir / "gru.ckpt.json").string() << "\n";
    return 0;
}

int cmd_labels(const TrainFlags &f, const std::optional<std::string> &gru_path) {
    const auto cfg = train_config(f, "labels");
    if (f.dump) {
        std::cout << to_json(cfg).dump(2) << "\n";
        return 0;
    }
    const auto gru = load_gru(gru_path ? fs::path(*gru_path)
                                       : cfg.output_dir / "gru.ckpt.json",
                              cfg.hidden_dim);
    const auto data = label_stage(cfg, gru);
    fs::create_directories(cfg.output_dir);
    save_dataset(data, cfg.output_dir / "depth2_labels.json");
    std::cout << "labelled " << data.samples.size() << " graphs; wrote "
              << (cfg.output_dir / "depth2_labels.json").string() << "\n";
    return 0;
}

int cmd_train_cnn(const TrainFlags &f, const std::optional<std::string> &labels) {
    const auto cfg = train_config(f, "cnn");
    if (f.dump) {
        std::cout << to_json(cfg).dump(2) << "\n";
        return 0;
    }
    const fs::path path =
        labels ? fs::path(*labels) : cfg.output_dir / "depth2_labels.json";
    if (!fs::exists(path)) {
        throw ConfigError("label set " + path.string() +
                          " not found; run labels first");
    }
    const auto result = cnn_stage(cfg, load_dataset(path));
    fs::create_directories(cfg.output_dir);
    save_checkpoint(result.weights.to_checkpoint(checkpoint_metadata(cfg, "cnn")),
                    cfg.output_dir / "cnn.ckpt.json");
    write_loss_csv(result.loss_history, cfg.output_dir / "cnn_loss.csv");
    std::cout << "CNN trained for " << result.loss_history.size()
              << " epochs, final loss " << result.loss_history.back()
              << "; wrote " << (cfg.output_dir / "cnn.ckpt.json").string() << "\n";
    return 0;
}

struct BenchFlags {
    std::string config;
    std::optional<std::string> experiment;
    std::vector<int> nodes;
    std::vector<double> probs;
    std::vector<double> ensemble;
    std::optional<int> instances;
    std::vector<std::string> methods;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::size_t> max_depth;
    std::optional<std::size_t> hidden;
    std::optional<std::string> variant;
    std::optional<std::string> gru;
    std::optional<std::string> cnn;
    std::optional<std::string> output;
    std::string stem;
    std::optional<std::string> graphs_dir;
    bool no_wall = false;
    bool dump = false;
};

int cmd_bench(const BenchFlags &f) {
    ExperimentConfig cfg;
    if (!f.config.empty()) {
        cfg = experiment_config_from_json(read_json_file(f.config));
    }
    if (f.experiment) cfg.kind = parse_experiment_kind(*f.experiment);
    if (!f.nodes.empty()) cfg.nodes = f.nodes;
    if (!f.probs.empty()) cfg.probs = f.probs;
    if (!f.ensemble.empty()) {
        if (f.ensemble.size() != 2) {
            throw ConfigError("--p-range takes two values");
        }
        cfg.p_ensemble = std::pair{f.ensemble[0], f.ensemble[1]};
    }
    if (f.instances) cfg.instances = *f.instances;
    if (!f.methods.empty()) cfg.methods = f.methods;
    if (f.seed) cfg.seed = *f.seed;
    if (f.threads) cfg.threads = *f.threads;
    if (f.max_depth) cfg.progressive.max_depth = *f.max_depth;
    if (f.hidden) cfg.hidden_dim = *f.hidden;
    if (f.variant) cfg.progressive.variant = parse_extrapolation_variant(*f.variant);
    if (f.gru) cfg.gru_checkpoint = *f.gru;
    if (f.cnn) cfg.cnn_checkpoint = *f.cnn;
    cfg.output_dir = resolve_output(f.output, cfg.output_dir);
    cfg.validate();
    if (f.dump) {
        std::cout << to_json(cfg).dump(2) << "\n";
        return 0;
    }

    const auto records = run_experiment(cfg);
    const std::string stem = f.stem.empty() ? to_string(cfg.kind) : f.stem;
    fs::create_directories(cfg.output_dir);
    if (f.no_wall) {
        std::ofstream raw(cfg.output_dir / (stem + ".csv"), std::ios::binary);
        write_results_csv(raw, records, false);
        std::ofstream agg(cfg.output_dir / (stem + "_aggregate.csv"),
                          std::ios::binary);
        write_aggregate_csv(agg, aggregate(records));
        if (!raw || !agg) {
            throw IoError("cannot write results under " + cfg.output_dir.string());
        }
    } else {
        write_results(records, cfg.output_dir, stem);
    }
    if (f.graphs_dir) {
        const fs::path dir = *f.graphs_dir;
        fs::create_directories(dir);
        std::map<std::uint64_t, const BenchmarkRecord *> seen;
        for (const auto &r : records) {
            seen.emplace(r.seed, &r);
        }
        for (const auto &[seed, r] : seen) {
            std::ofstream os(dir / ("n" + std::to_string(r->n) + "_p" + r->p +
                                    "_" + std::to_string(seed) + ".txt"));
            write_graph(os, instance_graph(cfg, r->n, r->p, seed));
        }
    }
    std::cout << records.size() << " records; wrote "
              << (cfg.output_dir / (stem + ".csv")).string() << "\n";
    return 0;
}

int cmd_report(const std::string &path, bool as_csv) {
    const auto rows = aggregate(read_results_csv(path));
    if (as_csv) {
        write_aggregate_csv(std::cout, rows);
        return 0;
    }
    std::cout << std::left << std::setw(18) << "experiment" << std::setw(5)
              << "n" << std::setw(9) << "p" << std::setw(7) << "depth"
              << std::setw(10) << "method" << std::right << std::setw(6) << "count"
              << std::setw(11) << "mean R" << std::setw(11) << "stddev" << "\n";
    std::cout << std::fixed << std::setprecision(4);
    for (const auto &r : rows) {
        std::cout << std::left << std::setw(18) << r.experiment << std::setw(5)
                  << r.n << std::setw(9) << r.p << std::setw(7) << r.depth
                  << std::setw(10) << r.method << std::right << std::setw(6)
                  << r.count << std::setw(11) << r.mean_ratio << std::setw(11)
                  << r.stddev_ratio << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"QAOA Max-Cut parameter initialization toolkit"};
    app.require_subcommand(1);

    TrainFlags gru_flags, label_flags, cnn_flags;
    auto *train_gru = app.add_subcommand("train-gru", "meta-train the depth-1 GRU");
    add_train_flags(*train_gru, gru_flags, true, false);

    std::optional<std::string> gru_path;
    auto *labels = app.add_subcommand("labels", "search depth-2 labels");
    add_train_flags(*labels, label_flags, false, true);
    labels->add_option("--gru", gru_path, "GRU checkpoint (default: output dir)");

    std::optional<std::string> label_path;
    auto *train_cnn = app.add_subcommand("train-cnn", "fit the depth-2 CNN");
    add_train_flags(*train_cnn, cnn_flags, true, false);
    train_cnn->add_option("--labels", label_path, "label set (default: output dir)");

    BenchFlags bf;
    auto *bench = app.add_subcommand("bench", "run a benchmark experiment");
    bench->add_option("-c,--config", bf.config, "experiment config (JSON)")
        ->check(CLI::ExistingFile);
    bench->add_option("-e,--experiment", bf.experiment,
                      "depth1-sweep | edgeprob-sweep | depth2-compare | "
                      "bilinear-sweep | strategy-compare");
    bench->add_option("--nodes", bf.nodes, "node counts");
    bench->add_option("--probs", bf.probs, "edge probabilities");
    bench->add_option("--p-range", bf.ensemble, "uniform p ensemble LO HI")
        ->expected(2);
    bench->add_option("--instances", bf.instances, "instances per cell");
    bench->add_option("--methods", bf.methods, "methods to run");
    bench->add_option("--seed", bf.seed, "master seed");
    bench->add_option("--threads", bf.threads, "worker threads (env QAOA_INIT_THREADS)");
    bench->add_option("--max-depth", bf.max_depth, "deepest extrapolated layer");
    bench->add_option("--hidden-dim", bf.hidden, "GRU hidden size of the checkpoint");
    bench->add_option("--variant", bf.variant, "shared-tail | successor");
    bench->add_option("--gru", bf.gru, "GRU checkpoint");
    bench->add_option("--cnn", bf.cnn, "CNN checkpoint");
    bench->add_option("-o,--output-dir", bf.output,
                      std::string("results directory (env ") + kOutputEnv + ")");
    bench->add_option("--stem", bf.stem, "file stem (default: experiment name)");
    bench->add_option("--save-graphs", bf.graphs_dir, "write instance graphs here");
    bench->add_flag("--no-wall-clock", bf.no_wall, "write wall_ms as 0");
    bench->add_flag("--print-config", bf.dump, "print the effective config and exit");

    std::string report_path;
    bool report_csv = false;
    auto *report = app.add_subcommand("report", "summarize a results CSV");
    report->add_option("results", report_path, "raw results CSV")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_flag("--csv", report_csv, "emit the aggregate as CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_gru) return cmd_train_gru(gru_flags);
        if (*labels) return cmd_labels(label_flags, gru_path);
        if (*train_cnn) return cmd_train_cnn(cnn_flags, label_path);
        if (*bench) return cmd_bench(bf);
        if (*report) return cmd_report(report_path, report_csv);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
