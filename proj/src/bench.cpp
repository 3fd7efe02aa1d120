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
#include "qaoa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "qaoa/errors.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {

namespace {

using nlohmann::json;

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void reject_unknown_keys(const json &doc, const std::set<std::string> &known,
                         std::string_view where) {
    if (!doc.is_object()) {
        throw ConfigError(std::string(where) + " must be a JSON object");
    }
    for (const auto &[key, value] : doc.items()) {
        if (!known.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " +
                              std::string(where));
        }
    }
}

template <typename T>
void read_into(const json &doc, const char *key, T &out) {
    if (!doc.contains(key)) {
        return;
    }
    try {
        out = doc.at(key).get<T>();
    } catch (const json::exception &e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

MaximizeOptions maximize_from_json(const json &doc, MaximizeOptions base,
                                   std::string_view where) {
    reject_unknown_keys(doc,
                        {"method", "learning_rate", "budget", "tol", "gradient"},
                        where);
    try {
        if (doc.contains("method")) {
            base.method = parse_optimizer_kind(doc["method"].get<std::string>());
        }
        if (doc.contains("gradient")) {
            base.gradient =
                parse_gradient_method(doc["gradient"].get<std::string>());
        }
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string(where) + ": " + e.what());
    }
    read_into(doc, "learning_rate", base.hyper.learning_rate);
    read_into(doc, "budget", base.budget);
    read_into(doc, "tol", base.tol);
    return base;
}

json maximize_to_json(const MaximizeOptions &o) {
    return {{"method", std::string(to_string(o.method))},
            {"learning_rate", o.hyper.learning_rate},
            {"budget", o.budget},
            {"tol", o.tol},
            {"gradient", std::string(to_string(o.gradient))}};
}

bool is_baseline(std::string_view m) {
    return m == "adam" || m == "rmsprop" || m == "adagrad";
}

bool needs_gru(std::string_view m) {
    return m == "gru" || m == "gru-cnn" || m == "bilinear";
}

bool needs_cnn(std::string_view m) { return m == "gru-cnn" || m == "bilinear"; }

unsigned thread_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char *env = std::getenv("QAOA_INIT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct Cell {
    int n;
    std::string p_label;
    int idx;
};

double p_sort_key(const std::string &p) {
    char *end = nullptr;
    const double v = std::strtod(p.c_str(), &end);
    return (end != p.c_str() && *end == '\0') ? v : HUGE_VAL;
}

auto record_key(const BenchmarkRecord &r) {
    return std::make_tuple(std::cref(r.experiment), r.n, p_sort_key(r.p),
                           std::cref(r.p), r.seed, r.depth, std::cref(r.method));
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

std::vector<BenchmarkRecord> run_cell(const ExperimentConfig &cfg,
                                      const Models &models,
                                      const std::vector<std::string> &methods,
                                      const Cell &cell) {
    const std::string experiment = to_string(cfg.kind);
    const std::uint64_t iseed =
        instance_seed(cfg.seed, cell.n, cell.p_label, cell.idx);
    const Graph graph = instance_graph(cfg, cell.n, cell.p_label, iseed);
    const QaoaObjective objective(graph);
    const double c_max = brute_force_max_cut(graph).c_max;
    const std::uint64_t init_seed = derive_seed(iseed, {1});

    std::vector<BenchmarkRecord> out;
    auto emit = [&](std::size_t depth, const std::string &method,
                    double energy, std::size_t grad_evals, std::size_t iters,
                    double wall) {
        out.push_back({experiment, cell.n, cell.p_label, iseed, depth, method,
                       energy, c_max, approximation_ratio(energy, c_max),
                       grad_evals, iters, wall});
    };

    switch (cfg.kind) {
    case ExperimentKind::Depth1Sweep:
    case ExperimentKind::EdgeProbSweep: {
        const QaoaParams init = random_params(1, init_seed);
        for (const auto &m : methods) {
            const auto t0 = std::chrono::steady_clock::now();
            MaximizeOptions opts = cfg.baseline;
            QaoaParams start = init;
            if (is_baseline(m)) {
                opts.method = parse_optimizer_kind(m);
            } else {
                opts.method = OptimizerKind::Adam;
                start = run_episode(*models.gru, objective, init_seed,
                                    cfg.progressive.depth1.episode)
                            .best_params();
            }
            const auto trace = maximize(objective, start, opts);
            emit(1, m, trace.best().energy, trace.gradient_evaluations,
                 trace.iterations, elapsed_ms(t0));
        }
        break;
    }
    case ExperimentKind::Depth2Compare:
    case ExperimentKind::BilinearSweep: {
        ProgressiveOptions po = cfg.progressive;
        if (cfg.kind == ExperimentKind::Depth2Compare) {
            po.max_depth = 2;
        }
        const auto t0 = std::chrono::steady_clock::now();
        const auto schedule =
            depth_progressive_run(objective, *models.gru, *models.cnn,
                                  init_seed, po);
        const double wall = elapsed_ms(t0);
        for (const auto &e : schedule.entries) {
            std::string method = "bilinear";
            if (cfg.kind == ExperimentKind::Depth2Compare) {
                method = e.depth == 1 ? "gru" : "gru-cnn";
                if (std::find(methods.begin(), methods.end(), method) ==
                    methods.end()) {
                    continue;
                }
            }
            emit(e.depth, method, e.energy, e.gradient_evaluations,
                 e.iterations, wall);
        }
        break;
    }
    case ExperimentKind::StrategyCompare: {
        for (const auto &m : methods) {
            const auto t0 = std::chrono::steady_clock::now();
            if (m == "bilinear") {
                ProgressiveOptions po = cfg.progressive;
                po.max_depth = cfg.target_depth;
                const auto schedule = depth_progressive_run(
                    objective, *models.gru, *models.cnn, init_seed, po);
                std::size_t evals = 0;
                std::size_t iters = 0;
                for (const auto &e : schedule.entries) {
                    evals += e.gradient_evaluations;
                    iters += e.iterations;
                }
                emit(cfg.target_depth, m, schedule.entries.back().energy, evals,
                     iters, elapsed_ms(t0));
            } else {
                const auto e = random_init_run(objective, cfg.target_depth,
                                               init_seed,
                                               cfg.progressive.refine, c_max);
                emit(cfg.target_depth, m, e.energy, e.gradient_evaluations,
                     e.iterations, elapsed_ms(t0));
            }
        }
        break;
    }
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

void write_file(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) {
        throw IoError("cannot write " + path.string());
    }
}

} // namespace

Graph instance_graph(const ExperimentConfig &cfg, int n, std::string_view p,
                     std::uint64_t iseed) {
    const std::string label(p);
    const double fixed = p_sort_key(label);
    double prob = fixed;
    if (!std::isfinite(fixed)) {
        if (!cfg.p_ensemble) {
            throw ConfigError("cell label '" + label + "' needs p_ensemble");
        }
        prob = Rng(derive_seed(iseed, {0xE})).uniform(cfg.p_ensemble->first,
                                                       cfg.p_ensemble->second);
    }
    return generate_erdos_renyi(n, prob, iseed);
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    static const std::map<std::string_view, ExperimentKind> kinds{
        {"depth1-sweep", ExperimentKind::Depth1Sweep},
        {"edgeprob-sweep", ExperimentKind::EdgeProbSweep},
        {"depth2-compare", ExperimentKind::Depth2Compare},
        {"bilinear-sweep", ExperimentKind::BilinearSweep},
        {"strategy-compare", ExperimentKind::StrategyCompare},
    };
    const auto it = kinds.find(name);
    if (it == kinds.end()) {
        throw ConfigError("unknown experiment '" + std::string(name) + "'");
    }
    return it->second;
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::Depth1Sweep:
        return "depth1-sweep";
    case ExperimentKind::EdgeProbSweep:
        return "edgeprob-sweep";
    case ExperimentKind::Depth2Compare:
        return "depth2-compare";
    case ExperimentKind::BilinearSweep:
        return "bilinear-sweep";
    case ExperimentKind::StrategyCompare:
        return "strategy-compare";
    }
    return "unknown";
}

std::vector<std::string> known_methods(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::Depth1Sweep:
    case ExperimentKind::EdgeProbSweep:
        return {"adam", "rmsprop", "adagrad", "gru"};
    case ExperimentKind::Depth2Compare:
        return {"gru", "gru-cnn"};
    case ExperimentKind::BilinearSweep:
        return {"bilinear"};
    case ExperimentKind::StrategyCompare:
        return {"bilinear", "random"};
    }
    return {};
}

std::vector<std::string> ExperimentConfig::resolved_methods() const {
    return methods.empty() ? known_methods(kind) : methods;
}

void ExperimentConfig::validate() const {
    if (instances < 1) {
        throw ConfigError("instances must be >= 1");
    }
    if (nodes.empty()) {
        throw ConfigError("no node counts given");
    }
    for (int n : nodes) {
        if (n < 2 || n > kMaxNodes) {
            throw ConfigError("node count " + std::to_string(n) +
                              " outside [2, " + std::to_string(kMaxNodes) + "]");
        }
    }
    if (probs.empty() && !p_ensemble) {
        throw ConfigError("no edge probabilities given");
    }
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("edge probability " + format_real(p) +
                              " outside [0, 1]");
        }
    }
    if (p_ensemble) {
        const auto [lo, hi] = *p_ensemble;
        if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) {
            throw ConfigError("p_ensemble must satisfy 0 <= lo <= hi <= 1");
        }
    }
    const auto allowed = known_methods(kind);
    for (const auto &m : resolved_methods()) {
        if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
            throw ConfigError("method '" + m + "' is not available in " +
                              to_string(kind));
        }
    }
    if (progressive.max_depth < 2) {
        throw ConfigError("max_depth must be >= 2");
    }
    if (kind == ExperimentKind::StrategyCompare && target_depth < 2) {
        throw ConfigError("target_depth must be >= 2");
    }
    if (baseline.budget < 1 || progressive.refine.budget < 1 ||
        progressive.depth1.refine.budget < 1) {
        throw ConfigError("optimizer budgets must be >= 1");
    }
    if (progressive.depth1.episode.horizon < 1) {
        throw ConfigError("horizon must be >= 1");
    }
}

ExperimentConfig experiment_config_from_json(const json &doc,
                                             ExperimentConfig cfg) {
    reject_unknown_keys(
        doc,
        {"experiment", "nodes", "probs", "p_ensemble", "instances", "methods",
         "seed", "baseline", "refine", "depth1_refine", "horizon",
         "feed_initial_input", "max_depth", "variant", "target_depth",
         "hidden_dim", "gru_checkpoint", "cnn_checkpoint", "output_dir",
         "threads"},
        "experiment config");
    if (doc.contains("experiment")) {
        cfg.kind = parse_experiment_kind(doc["experiment"].get<std::string>());
    }
    if (doc.contains("nodes")) {
        const auto &nodes = doc["nodes"];
        if (nodes.is_object()) {
            reject_unknown_keys(nodes, {"min", "max", "step"}, "nodes");
            int lo = 4, hi = 14, step = 1;
            read_into(nodes, "min", lo);
            read_into(nodes, "max", hi);
            read_into(nodes, "step", step);
            if (step < 1) {
                throw ConfigError("nodes.step must be >= 1");
            }
            cfg.nodes.clear();
            for (int n = lo; n <= hi; n += step) {
                cfg.nodes.push_back(n);
            }
        } else {
            read_into(doc, "nodes", cfg.nodes);
        }
    }
    read_into(doc, "probs", cfg.probs);
    if (doc.contains("p_ensemble")) {
        if (doc["p_ensemble"].is_null()) {
            cfg.p_ensemble.reset();
        } else {
            std::pair<double, double> range;
            read_into(doc, "p_ensemble", range);
            cfg.p_ensemble = range;
        }
    }
    read_into(doc, "instances", cfg.instances);
    read_into(doc, "methods", cfg.methods);
    read_into(doc, "seed", cfg.seed);
    if (doc.contains("baseline")) {
        cfg.baseline = maximize_from_json(doc["baseline"], cfg.baseline, "baseline");
    }
    if (doc.contains("refine")) {
        cfg.progressive.refine =
            maximize_from_json(doc["refine"], cfg.progressive.refine, "refine");
    }
    if (doc.contains("depth1_refine")) {
        cfg.progressive.depth1.refine = maximize_from_json(
            doc["depth1_refine"], cfg.progressive.depth1.refine, "depth1_refine");
    }
    read_into(doc, "horizon", cfg.progressive.depth1.episode.horizon);
    read_into(doc, "feed_initial_input",
              cfg.progressive.depth1.episode.feed_initial_input);
    read_into(doc, "max_depth", cfg.progressive.max_depth);
    if (doc.contains("variant")) {
        cfg.progressive.variant =
            parse_extrapolation_variant(doc["variant"].get<std::string>());
    }
    read_into(doc, "target_depth", cfg.target_depth);
    read_into(doc, "hidden_dim", cfg.hidden_dim);
    std::string path;
    if (doc.contains("gru_checkpoint")) {
        read_into(doc, "gru_checkpoint", path);
        cfg.gru_checkpoint = path;
    }
    if (doc.contains("cnn_checkpoint")) {
        read_into(doc, "cnn_checkpoint", path);
        cfg.cnn_checkpoint = path;
    }
    if (doc.contains("output_dir")) {
        read_into(doc, "output_dir", path);
        cfg.output_dir = path;
    }
    read_into(doc, "threads", cfg.threads);
    return cfg;
}

json to_json(const ExperimentConfig &cfg) {
    json doc{{"experiment", to_string(cfg.kind)},
             {"nodes", cfg.nodes},
             {"probs", cfg.probs},
             {"instances", cfg.instances},
             {"methods", cfg.resolved_methods()},
             {"seed", cfg.seed},
             {"baseline", maximize_to_json(cfg.baseline)},
             {"refine", maximize_to_json(cfg.progressive.refine)},
             {"depth1_refine", maximize_to_json(cfg.progressive.depth1.refine)},
             {"horizon", cfg.progressive.depth1.episode.horizon},
             {"feed_initial_input",
              cfg.progressive.depth1.episode.feed_initial_input},
             {"max_depth", cfg.progressive.max_depth},
             {"variant", to_string(cfg.progressive.variant)},
             {"target_depth", cfg.target_depth},
             {"hidden_dim", cfg.hidden_dim},
             {"gru_checkpoint", cfg.gru_checkpoint.string()},
             {"cnn_checkpoint", cfg.cnn_checkpoint.string()},
             {"output_dir", cfg.output_dir.string()},
             {"threads", cfg.threads}};
    doc["p_ensemble"] = cfg.p_ensemble ? json(*cfg.p_ensemble) : json(nullptr);
    return doc;
}

Models load_models(const ExperimentConfig &cfg) {
    Models models;
    bool want_gru = false;
    bool want_cnn = false;
    for (const auto &m : cfg.resolved_methods()) {
        want_gru = want_gru || needs_gru(m);
        want_cnn = want_cnn || needs_cnn(m);
    }
    auto load = [](const std::filesystem::path &path, const char *what) {
        if (!std::filesystem::exists(path)) {
            throw ConfigError(std::string(what) + " checkpoint not found: " +
                              path.string());
        }
        try {
            return load_checkpoint(path);
        } catch (const CheckpointError &e) {
            throw ConfigError(std::string(what) + " checkpoint " +
                              path.string() + ": " + e.what());
        }
    };
    try {
        if (want_gru) {
            models.gru = GruWeights::from_checkpoint(
                load(cfg.gru_checkpoint, "GRU"), cfg.hidden_dim);
        }
        if (want_cnn) {
            models.cnn = CnnWeights::from_checkpoint(
                load(cfg.cnn_checkpoint, "CNN"));
        }
    } catch (const CheckpointError &e) {
        throw ConfigError(e.what());
    }
    return models;
}

std::uint64_t instance_seed(std::uint64_t master, int n, std::string_view p,
                            int idx) {
    return derive_seed(master, {static_cast<std::uint64_t>(n), fnv1a(p),
                                static_cast<std::uint64_t>(idx)});
}

std::vector<BenchmarkRecord> run_experiment(const ExperimentConfig &cfg,
                                            const Models &models) {
    cfg.validate();
    const auto methods = cfg.resolved_methods();
    for (const auto &m : methods) {
        if (needs_gru(m) && !models.gru) {
            throw ConfigError("method '" + m + "' needs GRU weights");
        }
        if (needs_cnn(m) && !models.cnn) {
            throw ConfigError("method '" + m + "' needs CNN weights");
        }
    }

    std::vector<Cell> cells;
    for (int n : cfg.nodes) {
        for (double p : cfg.probs) {
            for (int i = 0; i < cfg.instances; ++i) {
                cells.push_back({n, format_real(p), i});
            }
        }
        if (cfg.p_ensemble) {
            const std::string label = format_real(cfg.p_ensemble->first) + "-" +
                                      format_real(cfg.p_ensemble->second);
            for (int i = 0; i < cfg.instances; ++i) {
                cells.push_back({n, label, i});
            }
        }
    }

    std::vector<std::vector<BenchmarkRecord>> results(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                results[i] = run_cell(cfg, models, methods, cells[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::min<std::size_t>(
        thread_count(cfg.threads), std::max<std::size_t>(1, cells.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    std::vector<BenchmarkRecord> records;
    for (auto &r : results) {
        records.insert(records.end(), r.begin(), r.end());
    }
    sort_records(records);
    return records;
}

std::vector<BenchmarkRecord> run_experiment(const ExperimentConfig &cfg) {
    cfg.validate();
    return run_experiment(cfg, load_models(cfg));
}

void sort_records(std::vector<BenchmarkRecord> &records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const BenchmarkRecord &a, const BenchmarkRecord &b) {
                         return record_key(a) < record_key(b);
                     });
}

std::vector<AggregateRow> aggregate(const std::vector<BenchmarkRecord> &input) {
    auto records = input;
    sort_records(records);
    using Key = std::tuple<std::string, int, double, std::string, std::size_t,
                           std::string>;
    std::map<Key, std::vector<double>> groups;
    for (const auto &r : records) {
        groups[{r.experiment, r.n, p_sort_key(r.p), r.p, r.depth, r.method}]
            .push_back(r.ratio);
    }
    std::vector<AggregateRow> rows;
    for (const auto &[key, ratios] : groups) {
        AggregateRow row;
        row.experiment = std::get<0>(key);
        row.n = std::get<1>(key);
        row.p = std::get<3>(key);
        row.depth = std::get<4>(key);
        row.method = std::get<5>(key);
        row.count = ratios.size();
        double sum = 0.0;
        for (double v : ratios) {
            sum += v;
        }
        row.mean_ratio = sum / static_cast<double>(ratios.size());
        if (ratios.size() > 1) {
            double ss = 0.0;
            for (double v : ratios) {
                ss += (v - row.mean_ratio) * (v - row.mean_ratio);
            }
            row.stddev_ratio =
                std::sqrt(ss / static_cast<double>(ratios.size() - 1));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_results_csv(std::ostream &os, std::vector<BenchmarkRecord> records,
                       bool include_wall_clock) {
    sort_records(records);
    os << kResultsHeader << "\n";
    for (const auto &r : records) {
        os << r.experiment << ',' << r.n << ',' << r.p << ',' << r.seed << ','
           << r.depth << ',' << r.method << ',' << format_real(r.energy) << ','
           << format_real(r.c_max) << ',' << format_real(r.ratio) << ','
           << r.grad_evals << ',' << r.iters << ','
           << format_real(include_wall_clock ? r.wall_ms : 0.0) << "\n";
    }
}

void write_aggregate_csv(std::ostream &os, const std::vector<AggregateRow> &rows) {
    os << "experiment,n,p,depth,method,count,mean_ratio,stddev_ratio\n";
    for (const auto &r : rows) {
        os << r.experiment << ',' << r.n << ',' << r.p << ',' << r.depth << ','
           << r.method << ',' << r.count << ',' << format_real(r.mean_ratio)
           << ',' << format_real(r.stddev_ratio) << "\n";
    }
}

void write_results(const std::vector<BenchmarkRecord> &records,
                   const std::filesystem::path &dir, const std::string &stem) {
    std::ostringstream raw;
    write_results_csv(raw, records);
    write_file(dir / (stem + ".csv"), raw.str());
    std::ostringstream agg;
    write_aggregate_csv(agg, aggregate(records));
    write_file(dir / (stem + "_aggregate.csv"), agg.str());
}

std::vector<BenchmarkRecord> read_results_csv(const std::filesystem::path &path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot read " + path.string());
    }
    std::string line;
    if (!std::getline(is, line) || line != kResultsHeader) {
        throw ConfigError(path.string() + ": missing results header");
    }
    std::vector<BenchmarkRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 12) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 12 fields");
        }
        try {
            out.push_back({f[0], std::stoi(f[1]), f[2], std::stoull(f[3]),
                           std::stoul(f[4]), f[5], std::stod(f[6]),
                           std::stod(f[7]), std::stod(f[8]), std::stoul(f[9]),
                           std::stoul(f[10]), std::stod(f[11])});
        } catch (const std::exception &) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": malformed field");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
    if (n_graphs == 0) {
        throw ConfigError("n_graphs must be >= 1");
    }
    if (n_min < 2 || n_max > kMaxNodes || n_min > n_max) {
        throw ConfigError("training node range must lie in [2, " +
                          std::to_string(kMaxNodes) + "]");
    }
    if (!(p_min >= 0.0 && p_min <= p_max && p_max <= 1.0)) {
        throw ConfigError("training p range must satisfy 0 <= p_min <= p_max <= 1");
    }
    if (hidden_dim == 0) {
        throw ConfigError("hidden_dim must be >= 1");
    }
    if (gru.epochs < 0 || cnn.epochs < 0) {
        throw ConfigError("epochs must be >= 0");
    }
    if (gru.batch_size == 0 || cnn.batch_size == 0) {
        throw ConfigError("batch sizes must be >= 1");
    }
    if (labels.restarts == 0) {
        throw ConfigError("label restarts must be >= 1");
    }
}

TrainConfig train_config_from_json(const json &doc, TrainConfig cfg) {
    reject_unknown_keys(doc,
                        {"seed", "n_graphs", "n_min", "n_max", "p_min", "p_max",
                         "hidden_dim", "init_scale", "gru", "labels", "cnn",
                         "output_dir"},
                        "training config");
    read_into(doc, "seed", cfg.seed);
    read_into(doc, "n_graphs", cfg.n_graphs);
    read_into(doc, "n_min", cfg.n_min);
    read_into(doc, "n_max", cfg.n_max);
    read_into(doc, "p_min", cfg.p_min);
    read_into(doc, "p_max", cfg.p_max);
    read_into(doc, "hidden_dim", cfg.hidden_dim);
    read_into(doc, "init_scale", cfg.init_scale);
    if (doc.contains("gru")) {
        const auto &g = doc["gru"];
        reject_unknown_keys(g,
                            {"epochs", "meta_lr", "batch_size", "horizon",
                             "feed_initial_input"},
                            "gru");
        read_into(g, "epochs", cfg.gru.epochs);
        read_into(g, "meta_lr", cfg.gru.meta_lr);
        read_into(g, "batch_size", cfg.gru.batch_size);
        read_into(g, "horizon", cfg.gru.episode.horizon);
        read_into(g, "feed_initial_input", cfg.gru.episode.feed_initial_input);
    }
    if (doc.contains("labels")) {
        const auto &l = doc["labels"];
        reject_unknown_keys(l, {"restarts", "search", "depth1_refine",
                                "tie_tolerance"},
                            "labels");
        read_into(l, "restarts", cfg.labels.restarts);
        read_into(l, "tie_tolerance", cfg.labels.tie_tolerance);
        if (l.contains("search")) {
            cfg.labels.search =
                maximize_from_json(l["search"], cfg.labels.search, "labels.search");
        }
        if (l.contains("depth1_refine")) {
            cfg.labels.depth1.refine = maximize_from_json(
                l["depth1_refine"], cfg.labels.depth1.refine,
                "labels.depth1_refine");
        }
    }
    if (doc.contains("cnn")) {
        const auto &c = doc["cnn"];
        reject_unknown_keys(c, {"epochs", "batch_size", "learning_rate"}, "cnn");
        read_into(c, "epochs", cfg.cnn.epochs);
        read_into(c, "batch_size", cfg.cnn.batch_size);
        read_into(c, "learning_rate", cfg.cnn.learning_rate);
    }
    if (doc.contains("output_dir")) {
        std::string path;
        read_into(doc, "output_dir", path);
        cfg.output_dir = path;
    }
    return cfg;
}

json to_json(const TrainConfig &cfg) {
    return {{"seed", cfg.seed},
            {"n_graphs", cfg.n_graphs},
            {"n_min", cfg.n_min},
            {"n_max", cfg.n_max},
            {"p_min", cfg.p_min},
            {"p_max", cfg.p_max},
            {"hidden_dim", cfg.hidden_dim},
            {"init_scale", cfg.init_scale},
            {"gru",
             {{"epochs", cfg.gru.epochs},
              {"meta_lr", cfg.gru.meta_lr},
              {"batch_size", cfg.gru.batch_size},
              {"horizon", cfg.gru.episode.horizon},
              {"feed_initial_input", cfg.gru.episode.feed_initial_input}}},
            {"labels",
             {{"restarts", cfg.labels.restarts},
              {"tie_tolerance", cfg.labels.tie_tolerance},
              {"search", maximize_to_json(cfg.labels.search)},
              {"depth1_refine", maximize_to_json(cfg.labels.depth1.refine)}}},
            {"cnn",
             {{"epochs", cfg.cnn.epochs},
              {"batch_size", cfg.cnn.batch_size},
              {"learning_rate", cfg.cnn.learning_rate}}},
            {"output_dir", cfg.output_dir.string()}};
}

std::vector<Graph> training_graphs(const TrainConfig &cfg) {
    cfg.validate();
    std::vector<Graph> graphs;
    graphs.reserve(cfg.n_graphs);
    for (std::size_t i = 0; i < cfg.n_graphs; ++i) {
        const std::uint64_t s = derive_seed(cfg.seed, {0x7A, i});
        Rng rng(s);
        const int n = cfg.n_min + static_cast<int>(rng.below(
                                      std::uint64_t(cfg.n_max - cfg.n_min + 1)));
        const double p = rng.uniform(cfg.p_min, cfg.p_max);
        graphs.push_back(generate_erdos_renyi(n, p, derive_seed(s, {1})));
    }
    return graphs;
}

GruTrainResult train_gru_stage(const TrainConfig &cfg) {
    const auto graphs = training_graphs(cfg);
    const GruWeights init = GruWeights::random(
        cfg.hidden_dim, derive_seed(cfg.seed, {0x61}), cfg.init_scale);
    GruTrainOptions opts = cfg.gru;
    opts.seed = derive_seed(cfg.seed, {0x62});
    return train_gru(init, graphs, opts);
}

Depth2Dataset label_stage(const TrainConfig &cfg, const GruWeights &gru) {
    LabelOptions opts = cfg.labels;
    opts.depth1.episode = cfg.gru.episode;
    return make_depth2_labels(training_graphs(cfg), gru,
                              derive_seed(cfg.seed, {0x63}), opts);
}

CnnTrainResult cnn_stage(const TrainConfig &cfg, const Depth2Dataset &labels) {
    if (labels.samples.empty()) {
        throw ConfigError("CNN training needs a nonempty label set");
    }
    CnnTrainOptions opts = cfg.cnn;
    opts.seed = derive_seed(cfg.seed, {0x65});
    return train_cnn(CnnWeights::random(derive_seed(cfg.seed, {0x64})),
                     labels.cnn_samples(), opts);
}

TrainedModels train_models(const TrainConfig &cfg) {
    cfg.validate();
    TrainedModels out;
    auto gru = train_gru_stage(cfg);
    out.gru = std::move(gru.weights);
    out.gru_loss = std::move(gru.loss_history);
    out.labels = label_stage(cfg, out.gru);
    auto cnn = cnn_stage(cfg, out.labels);
    out.cnn = std::move(cnn.weights);
    out.cnn_loss = std::move(cnn.loss_history);
    return out;
}

json checkpoint_metadata(const TrainConfig &cfg, std::string_view kind) {
    json meta{{"seed", cfg.seed}, {"format_version", kCheckpointVersion}};
    if (kind == "gru") {
        meta["hidden_dim"] = cfg.hidden_dim;
        meta["param_dim"] = 2;
        meta["training"] = to_json(cfg)["gru"];
        meta["n_graphs"] = cfg.n_graphs;
    } else {
        meta["shapes"] = {{"conv1", {16, 1, 2, 2}},
                          {"conv2", {64, 16, 2, 2}},
                          {"conv3", {1, 64, 3, 2}}};
        meta["training"] = to_json(cfg)["cnn"];
        meta["labels"] = to_json(cfg)["labels"];
    }
    return meta;
}

void write_loss_csv(const std::vector<double> &history,
                    const std::filesystem::path &path) {
    std::ostringstream os;
    os << "epoch,loss\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        os << i << ',' << format_real(history[i]) << "\n";
    }
    write_file(path, os.str());
}

void save_trained_models(const TrainConfig &cfg, const TrainedModels &models) {
    const auto &dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    save_checkpoint(models.gru.to_checkpoint(checkpoint_metadata(cfg, "gru")),
                    dir / "gru.ckpt.json");
    write_loss_csv(models.gru_loss, dir / "gru_loss.csv");
    save_dataset(models.labels, dir / "depth2_labels.json");
    save_checkpoint(models.cnn.to_checkpoint(checkpoint_metadata(cfg, "cnn")),
                    dir / "cnn.ckpt.json");
    write_loss_csv(models.cnn_loss, dir / "cnn_loss.csv");
}

} // namespace qaoa
