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
/**
 * @file Experiment driver: instance grids, method runs, model training and
 * CSV output.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qaoa/bilinear.hpp"
#include "qaoa/cnn_predictor.hpp"
#include "qaoa/meta_gru.hpp"
#include "qaoa/optimizers.hpp"

namespace qaoa {

enum class ExperimentKind {
    Depth1Sweep,
    EdgeProbSweep,
    Depth2Compare,
    BilinearSweep,
    StrategyCompare,
};

/// "depth1-sweep", "edgeprob-sweep", "depth2-compare", "bilinear-sweep",
/// "strategy-compare". @throws ConfigError otherwise.
ExperimentKind parse_experiment_kind(std::string_view name);
std::string to_string(ExperimentKind kind);

/// Methods each experiment accepts, in canonical order.
std::vector<std::string> known_methods(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Depth1Sweep;
    std::vector<int> nodes{4, 6, 8, 10, 12, 14};
    /// Fixed edge probabilities, one cell each.
    std::vector<double> probs{0.5};
    /// When set, one extra cell per n with p drawn uniformly per instance.
    std::optional<std::pair<double, double>> p_ensemble;
    int instances = 10;
    /// Empty means every method in known_methods(kind).
    std::vector<std::string> methods;
    std::uint64_t seed = 2024;
    /// Optimizer settings shared by the depth-1 baselines and the
    /// GRU-initialized run.
    MaximizeOptions baseline;
    ProgressiveOptions progressive;
    /// Target depth of strategy-compare.
    std::size_t target_depth = 10;
    std::size_t hidden_dim = 32;
    std::filesystem::path gru_checkpoint = "models/gru.ckpt.json";
    std::filesystem::path cnn_checkpoint = "models/cnn.ckpt.json";
    std::filesystem::path output_dir = "results";
    /// 0 means QAOA_INIT_THREADS or the hardware concurrency.
    unsigned threads = 0;

    /// @throws ConfigError on out-of-range fields or unknown methods.
    void validate() const;
    [[nodiscard]] std::vector<std::string> resolved_methods() const;
};

/// Unknown keys are rejected. @throws ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json &doc,
                                             ExperimentConfig base = {});
nlohmann::json to_json(const ExperimentConfig &cfg);

struct BenchmarkRecord {
    std::string experiment;
    int n = 0;
    /// Cell label: the fixed p, or "lo-hi" for the uniform ensemble.
    std::string p;
    std::uint64_t seed = 0;
    std::size_t depth = 0;
    std::string method;
    double energy = 0.0;
    double c_max = 0.0;
    double ratio = 0.0;
    std::size_t grad_evals = 0;
    std::size_t iters = 0;
    double wall_ms = 0.0;
};

struct Models {
    std::optional<GruWeights> gru;
    std::optional<CnnWeights> cnn;
};

/// Loads the checkpoints the experiment's methods need.
/// @throws ConfigError if a required checkpoint is missing or unreadable.
Models load_models(const ExperimentConfig &cfg);

/// Instance seed of cell (n, p) instance idx.
std::uint64_t instance_seed(std::uint64_t master, int n, std::string_view p,
                            int idx);

/// Regenerates a benchmark instance from its record fields. A numeric p is
/// used as is; a range label draws p from cfg.p_ensemble.
Graph instance_graph(const ExperimentConfig &cfg, int n, std::string_view p,
                     std::uint64_t iseed);

/**
 * @brief Runs every (n, p, instance) cell and every method. Cells run on a
 * thread pool; records come back sorted.
 * @throws ConfigError if a neural method lacks weights.
 */
std::vector<BenchmarkRecord> run_experiment(const ExperimentConfig &cfg,
                                            const Models &models);
std::vector<BenchmarkRecord> run_experiment(const ExperimentConfig &cfg);

/// Order by (experiment, n, p, seed, depth, method).
void sort_records(std::vector<BenchmarkRecord> &records);

inline constexpr std::string_view kResultsHeader =
    "experiment,n,p,seed,depth,method,energy,c_max,ratio,grad_evals,iters,"
    "wall_ms";

struct AggregateRow {
    std::string experiment;
    int n = 0;
    std::string p;
    std::size_t depth = 0;
    std::string method;
    std::size_t count = 0;
    double mean_ratio = 0.0;
    /// Sample standard deviation; 0 for a single record.
    double stddev_ratio = 0.0;
};

std::vector<AggregateRow> aggregate(const std::vector<BenchmarkRecord> &records);

/// Raw CSV in canonical order. wall_ms is written as 0 when
/// include_wall_clock is false.
void write_results_csv(std::ostream &os, std::vector<BenchmarkRecord> records,
                       bool include_wall_clock = true);
void write_aggregate_csv(std::ostream &os, const std::vector<AggregateRow> &rows);

/// Writes <stem>.csv and <stem>_aggregate.csv under dir.
/// @throws IoError if the files cannot be written.
void write_results(const std::vector<BenchmarkRecord> &records,
                   const std::filesystem::path &dir, const std::string &stem);

/// @throws IoError or ConfigError on unreadable or malformed CSV.
std::vector<BenchmarkRecord> read_results_csv(const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// Training.

struct TrainConfig {
    std::uint64_t seed = 7;
    std::size_t n_graphs = 100;
    int n_min = 4;
    int n_max = 14;
    double p_min = 0.5;
    double p_max = 1.0;
    std::size_t hidden_dim = 32;
    double init_scale = 0.08;
    GruTrainOptions gru;
    LabelOptions labels;
    CnnTrainOptions cnn;
    std::filesystem::path output_dir = "models";

    /// @throws ConfigError on out-of-range fields.
    void validate() const;
};

TrainConfig train_config_from_json(const nlohmann::json &doc,
                                   TrainConfig base = {});
nlohmann::json to_json(const TrainConfig &cfg);

/// Training graphs: n uniform in [n_min, n_max], p uniform in [p_min, p_max].
std::vector<Graph> training_graphs(const TrainConfig &cfg);

struct TrainedModels {
    GruWeights gru;
    std::vector<double> gru_loss;
    Depth2Dataset labels;
    CnnWeights cnn;
    std::vector<double> cnn_loss;
};

GruTrainResult train_gru_stage(const TrainConfig &cfg);
Depth2Dataset label_stage(const TrainConfig &cfg, const GruWeights &gru);
CnnTrainResult cnn_stage(const TrainConfig &cfg, const Depth2Dataset &labels);

/// All three stages in memory.
TrainedModels train_models(const TrainConfig &cfg);

/// Checkpoints, label set and loss histories under cfg.output_dir:
/// gru.ckpt.json, gru_loss.csv, depth2_labels.json, cnn.ckpt.json,
/// cnn_loss.csv.
void save_trained_models(const TrainConfig &cfg, const TrainedModels &models);

nlohmann::json checkpoint_metadata(const TrainConfig &cfg, std::string_view kind);
void write_loss_csv(const std::vector<double> &history,
                    const std::filesystem::path &path);

} // namespace qaoa
