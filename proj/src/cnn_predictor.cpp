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
#include "qaoa/cnn_predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qaoa/errors.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {

namespace {

struct ConvShape {
    std::size_t out_c, in_c, kh, kw, pad;
};

constexpr ConvShape kConv1{16, 1, 2, 2, 1};
constexpr ConvShape kConv2{64, 16, 2, 2, 1};
constexpr ConvShape kConv3{1, 64, 3, 2, 0};

Tensor conv_forward(const ConvShape &s, const Tensor &w, const Tensor &b,
                    const Tensor &in) {
    const std::size_t rows = in.shape[1];
    const std::size_t cols = in.shape[2];
    const std::size_t out_rows = rows + 2 * s.pad - s.kh + 1;
    const std::size_t out_cols = cols + 2 * s.pad - s.kw + 1;
    Tensor out({s.out_c, out_rows, out_cols});
    for (std::size_t o = 0; o < s.out_c; ++o) {
        for (std::size_t i = 0; i < out_rows; ++i) {
            for (std::size_t j = 0; j < out_cols; ++j) {
                double acc = b[o];
                for (std::size_t c = 0; c < s.in_c; ++c) {
                    for (std::size_t ki = 0; ki < s.kh; ++ki) {
                        const std::size_t r = i + ki;
                        if (r < s.pad || r - s.pad >= rows) {
                            continue;
                        }
                        for (std::size_t kj = 0; kj < s.kw; ++kj) {
                            const std::size_t q = j + kj;
                            if (q < s.pad || q - s.pad >= cols) {
                                continue;
                            }
                            acc += w[((o * s.in_c + c) * s.kh + ki) * s.kw + kj] *
                                   in[(c * rows + r - s.pad) * cols + q - s.pad];
                        }
                    }
                }
                out[(o * out_rows + i) * out_cols + j] = acc;
            }
        }
    }
    return out;
}

/// Accumulates dW, db and returns d/d(input).
Tensor conv_backward(const ConvShape &s, const Tensor &w, const Tensor &in,
                     const Tensor &dout, Tensor &dw, Tensor &db) {
    const std::size_t rows = in.shape[1];
    const std::size_t cols = in.shape[2];
    const std::size_t out_rows = dout.shape[1];
    const std::size_t out_cols = dout.shape[2];
    Tensor din(in.shape);
    for (std::size_t o = 0; o < s.out_c; ++o) {
        for (std::size_t i = 0; i < out_rows; ++i) {
            for (std::size_t j = 0; j < out_cols; ++j) {
                const double g = dout[(o * out_rows + i) * out_cols + j];
                if (g == 0.0) {
                    continue;
                }
                db[o] += g;
                for (std::size_t c = 0; c < s.in_c; ++c) {
                    for (std::size_t ki = 0; ki < s.kh; ++ki) {
                        const std::size_t r = i + ki;
                        if (r < s.pad || r - s.pad >= rows) {
                            continue;
                        }
                        for (std::size_t kj = 0; kj < s.kw; ++kj) {
                            const std::size_t q = j + kj;
                            if (q < s.pad || q - s.pad >= cols) {
                                continue;
                            }
                            const std::size_t wi =
                                ((o * s.in_c + c) * s.kh + ki) * s.kw + kj;
                            const std::size_t xi =
                                (c * rows + r - s.pad) * cols + q - s.pad;
                            dw[wi] += g * in[xi];
                            din[xi] += g * w[wi];
                        }
                    }
                }
            }
        }
    }
    return din;
}

void relu_inplace(Tensor &t) {
    for (auto &v : t.values) {
        v = std::max(v, 0.0);
    }
}

void require_shape(const Tensor &t, std::vector<std::size_t> shape,
                   const char *stage) {
    if (t.shape != shape) {
        throw std::logic_error(std::string("CNN ") + stage + " has shape " +
                               shape_string(t.shape) + ", expected " +
                               shape_string(shape));
    }
}

template <typename Self, typename F> void visit_tensors(Self &w, F &&f) {
    f("conv1_w", w.conv1_w);
    f("conv1_b", w.conv1_b);
    f("conv2_w", w.conv2_w);
    f("conv2_b", w.conv2_b);
    f("conv3_w", w.conv3_w);
    f("conv3_b", w.conv3_b);
}

Theta2 read_output(const Tensor &out) {
    return {out[0], out[1], out[2], out[3]};
}

double squared_distance(const Theta2 &a, const Theta2 &b) {
    double s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    return s;
}

} // namespace

CnnWeights CnnWeights::random(std::uint64_t seed) {
    CnnWeights w;
    Rng rng(seed);
    auto fill = [&](Tensor &t, double fan_in) {
        const double bound = 1.0 / std::sqrt(fan_in);
        for (auto &v : t.values) {
            v = rng.uniform(-bound, bound);
        }
    };
    fill(w.conv1_w, 1 * 2 * 2);
    fill(w.conv1_b, 1 * 2 * 2);
    fill(w.conv2_w, 16 * 2 * 2);
    fill(w.conv2_b, 16 * 2 * 2);
    fill(w.conv3_w, 64 * 3 * 2);
    fill(w.conv3_b, 64 * 3 * 2);
    return w;
}

NamedTensors CnnWeights::named() const {
    NamedTensors out;
    visit_tensors(*this, [&](const char *name, const Tensor &t) {
        out.emplace_back(name, t);
    });
    return out;
}

void CnnWeights::assign(const NamedTensors &tensors) {
    std::size_t i = 0;
    visit_tensors(*this, [&](const char *name, Tensor &t) {
        if (i >= tensors.size() || tensors[i].first != name ||
            tensors[i].second.shape != t.shape) {
            throw std::invalid_argument(std::string("CNN tensor mismatch at ") +
                                        name);
        }
        t = tensors[i++].second;
    });
}

std::vector<double> CnnWeights::flat() const { return flatten(named()); }

void CnnWeights::assign_flat(const std::vector<double> &flat) {
    NamedTensors tensors = named();
    unflatten_into(tensors, flat);
    assign(tensors);
}

Checkpoint CnnWeights::to_checkpoint(nlohmann::json metadata) const {
    Checkpoint ckpt;
    ckpt.kind = "cnn";
    ckpt.metadata = metadata.is_null() ? nlohmann::json::object()
                                       : std::move(metadata);
    ckpt.arrays = named();
    return ckpt;
}

CnnWeights CnnWeights::from_checkpoint(const Checkpoint &ckpt) {
    require_kind(ckpt, "cnn");
    CnnWeights w;
    visit_tensors(w, [&](const char *name, Tensor &t) {
        t = require_array(ckpt, name, t.shape);
    });
    for (double v : w.flat()) {
        if (!std::isfinite(v)) {
            throw CheckpointError(CheckpointError::Kind::Corrupt,
                                  "CNN checkpoint holds non-finite weights");
        }
    }
    return w;
}

CnnTrace cnn_forward_trace(const CnnWeights &w, const Theta1 &theta1) {
    if (!std::isfinite(theta1[0]) || !std::isfinite(theta1[1])) {
        throw NumericError("CNN input is not finite");
    }
    CnnTrace t;
    t.input = Tensor({1, 2, 1});
    t.input.values = {theta1[0], theta1[1]};
    t.conv1 = conv_forward(kConv1, w.conv1_w, w.conv1_b, t.input);
    relu_inplace(t.conv1);
    require_shape(t.conv1, {16, 3, 2}, "conv1");
    t.conv2 = conv_forward(kConv2, w.conv2_w, w.conv2_b, t.conv1);
    relu_inplace(t.conv2);
    require_shape(t.conv2, {64, 4, 3}, "conv2");
    t.output = conv_forward(kConv3, w.conv3_w, w.conv3_b, t.conv2);
    require_shape(t.output, {1, 2, 2}, "conv3");
    return t;
}

Theta2 cnn_forward(const CnnWeights &w, const Theta1 &theta1) {
    return read_output(cnn_forward_trace(w, theta1).output);
}

QaoaParams cnn_predict(const CnnWeights &w, const QaoaParams &depth1) {
    if (depth1.depth() != 1) {
        throw std::invalid_argument("cnn_predict expects depth-1 parameters");
    }
    const Theta2 out = cnn_forward(w, {depth1.gammas[0], depth1.betas[0]});
    return QaoaParams::unflatten(out);
}

double cnn_loss(std::span<const Theta2> predictions,
                std::span<const Theta2> labels) {
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("cnn_loss: " +
                                    std::to_string(predictions.size()) +
                                    " predictions for " +
                                    std::to_string(labels.size()) + " labels");
    }
    if (predictions.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        s += squared_distance(predictions[i], labels[i]);
    }
    return s / static_cast<double>(labels.size());
}

CnnGradient cnn_loss_and_gradient(const CnnWeights &w,
                                  std::span<const CnnSample> samples) {
    if (samples.empty()) {
        throw std::invalid_argument("cnn gradient of an empty batch");
    }
    CnnWeights g = CnnWeights::zeros();
    const double inv = 1.0 / static_cast<double>(samples.size());
    double loss = 0.0;
    for (const auto &s : samples) {
        const CnnTrace t = cnn_forward_trace(w, s.input);
        const Theta2 out = read_output(t.output);
        loss += squared_distance(out, s.label);

        Tensor d3({1, 2, 2});
        for (std::size_t k = 0; k < 4; ++k) {
            d3[k] = 2.0 * (out[k] - s.label[k]) * inv;
        }
        Tensor d2 = conv_backward(kConv3, w.conv3_w, t.conv2, d3, g.conv3_w,
                                  g.conv3_b);
        for (std::size_t k = 0; k < d2.size(); ++k) {
            if (t.conv2[k] <= 0.0) {
                d2[k] = 0.0;
            }
        }
        Tensor d1 = conv_backward(kConv2, w.conv2_w, t.conv1, d2, g.conv2_w,
                                  g.conv2_b);
        for (std::size_t k = 0; k < d1.size(); ++k) {
            if (t.conv1[k] <= 0.0) {
                d1[k] = 0.0;
            }
        }
        (void)conv_backward(kConv1, w.conv1_w, t.input, d1, g.conv1_w,
                            g.conv1_b);
    }
    return {loss * inv, g.flat()};
}

GradientCheckReport cnn_weight_gradient_check(
    const CnnWeights &w, std::span<const CnnSample> samples, std::size_t count,
    std::uint64_t seed, double h, const CnnGradientFn &gradient_fn) {
    auto evaluate = [&](const CnnWeights &probe, std::vector<bool> &mask) {
        std::vector<Theta2> pred;
        std::vector<Theta2> labels;
        mask.clear();
        for (const auto &s : samples) {
            const CnnTrace t = cnn_forward_trace(probe, s.input);
            for (double v : t.conv1.values) mask.push_back(v > 0.0);
            for (double v : t.conv2.values) mask.push_back(v > 0.0);
            pred.push_back(read_output(t.output));
            labels.push_back(s.label);
        }
        return cnn_loss(pred, labels);
    };

    const auto analytic = gradient_fn(w, samples).grad;
    std::vector<double> flat = w.flat();
    std::vector<std::size_t> order(flat.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng(seed).shuffle(order);

    std::vector<bool> centre;
    std::vector<bool> mask_up;
    std::vector<bool> mask_down;
    (void)evaluate(w, centre);

    GradientCheckReport report;
    CnnWeights probe = w;
    for (std::size_t idx : order) {
        if (report.indices.size() == count) {
            break;
        }
        const double keep = flat[idx];
        flat[idx] = keep + h;
        probe.assign_flat(flat);
        const double up = evaluate(probe, mask_up);
        flat[idx] = keep - h;
        probe.assign_flat(flat);
        const double down = evaluate(probe, mask_down);
        flat[idx] = keep;
        if (mask_up != centre || mask_down != centre) {
            // A ReLU switches inside [w - h, w + h]; the central difference
            // is not a derivative estimate there.
            ++report.skipped;
            continue;
        }
        const double numeric = (up - down) / (2 * h);
        const double a = analytic.at(idx);
        const double err = std::abs(a - numeric) /
                           std::max({std::abs(a), std::abs(numeric), 1e-6});
        report.indices.push_back(idx);
        report.analytic.push_back(a);
        report.numeric.push_back(numeric);
        report.max_relative_error = std::max(report.max_relative_error, err);
    }
    return report;
}

CnnTrainResult train_cnn(CnnWeights weights, std::span<const CnnSample> samples,
                         const CnnTrainOptions &options) {
    if (samples.empty()) {
        throw std::invalid_argument("train_cnn: empty dataset");
    }
    if (options.batch_size == 0) {
        throw std::invalid_argument("train_cnn: batch size must be positive");
    }
    std::vector<double> flat = weights.flat();
    OptimizerState adam(OptimizerKind::Adam, flat.size(),
                        {.learning_rate = options.learning_rate});
    CnnTrainResult result;
    std::vector<std::size_t> order(samples.size());
    std::vector<CnnSample> batch;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng(derive_seed(options.seed, {std::uint64_t(epoch)})).shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += options.batch_size) {
            const std::size_t stop =
                std::min(order.size(), start + options.batch_size);
            batch.clear();
            for (std::size_t k = start; k < stop; ++k) {
                batch.push_back(samples[order[k]]);
            }
            CnnGradient g = cnn_loss_and_gradient(weights, batch);
            if (!std::isfinite(g.loss)) {
                throw NumericError("train_cnn: non-finite loss at epoch " +
                                   std::to_string(epoch));
            }
            epoch_loss += g.loss * static_cast<double>(batch.size());
            for (auto &v : g.grad) {
                v = -v;
            }
            optimizer_step(adam, flat, g.grad);
            weights.assign_flat(flat);
        }
        result.loss_history.push_back(epoch_loss /
                                      static_cast<double>(samples.size()));
    }
    result.weights = std::move(weights);
    return result;
}

// ---------------------------------------------------------------------------

std::vector<CnnSample> Depth2Dataset::cnn_samples() const {
    std::vector<CnnSample> out;
    out.reserve(samples.size());
    for (const auto &s : samples) {
        out.push_back({s.theta1, s.theta2_star});
    }
    return out;
}

nlohmann::json to_json(const Depth2Dataset &data) {
    auto samples = nlohmann::json::array();
    for (const auto &s : data.samples) {
        std::ostringstream graph;
        write_graph(graph, s.graph);
        samples.push_back({{"graph", graph.str()},
                           {"theta1", s.theta1},
                           {"theta2_star", s.theta2_star},
                           {"label_energy", s.label_energy},
                           {"c_max", s.c_max}});
    }
    return {{"samples", std::move(samples)}};
}

Depth2Dataset dataset_from_json(const nlohmann::json &doc) {
    try {
        Depth2Dataset data;
        for (const auto &s : doc.at("samples")) {
            std::istringstream graph(s.at("graph").get<std::string>());
            data.samples.push_back({read_graph(graph),
                                    s.at("theta1").get<Theta1>(),
                                    s.at("theta2_star").get<Theta2>(),
                                    s.at("label_energy").get<double>(),
                                    s.at("c_max").get<double>()});
        }
        return data;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("malformed depth-2 dataset: ") +
                          e.what());
    }
}

void save_dataset(const Depth2Dataset &data, const std::filesystem::path &path) {
    std::ofstream os(path);
    os << to_json(data).dump(1) << "\n";
    if (!os) {
        throw IoError("cannot write " + path.string());
    }
}

Depth2Dataset load_dataset(const std::filesystem::path &path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot read " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return dataset_from_json(doc);
}

Depth2Dataset make_depth2_labels(std::span<const Graph> graphs,
                                 const GruWeights &gru, std::uint64_t seed,
                                 const LabelOptions &options) {
    if (options.restarts == 0) {
        throw std::invalid_argument("make_depth2_labels: restarts must be >= 1");
    }
    Depth2Dataset data;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const QaoaObjective objective(graphs[gi]);
        Depth2Sample s{graphs[gi]};
        s.c_max = brute_force_max_cut(graphs[gi]).c_max;

        const QaoaParams d1 = gru_depth1_params(
            gru, objective, derive_seed(seed, {0xD1, gi}), options.depth1);
        s.theta1 = {d1.gammas[0], d1.betas[0]};

        std::vector<OptimizationTrace> runs;
        runs.reserve(options.restarts);
        double best_energy = -1.0;
        for (std::size_t r = 0; r < options.restarts; ++r) {
            const QaoaParams start =
                random_params(2, derive_seed(seed, {0xD2, gi, r}));
            runs.push_back(maximize(objective, start, options.search));
            best_energy = std::max(best_energy, runs.back().best().energy);
        }
        // Near-ties go to the smallest folded angles.
        const double slack = options.tie_tolerance * std::max(1.0, s.c_max);
        QaoaParams best;
        double best_norm = std::numeric_limits<double>::infinity();
        for (const auto &run : runs) {
            if (run.best().energy < best_energy - slack) {
                continue;
            }
            const QaoaParams folded = symmetry_reduce(run.best().params);
            double norm = 0.0;
            for (double v : folded.flatten()) {
                norm += v * v;
            }
            if (norm < best_norm) {
                best_norm = norm;
                best = folded;
            }
        }
        const auto flat = best.flatten();
        std::copy(flat.begin(), flat.end(), s.theta2_star.begin());
        s.label_energy = objective.energy(best);
        data.samples.push_back(std::move(s));
    }
    return data;
}

} // namespace qaoa
