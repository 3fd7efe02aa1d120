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
#include "qaoa/meta_gru.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qaoa/errors.hpp"
#include "qaoa/optimizers.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {

namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

// y += M x for row-major M.
void add_matvec(const Tensor &m, std::span<const double> x,
                std::span<double> y) {
    const std::size_t rows = m.shape[0];
    const std::size_t cols = m.shape[1];
    for (std::size_t i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            acc += m[i * cols + j] * x[j];
        }
        y[i] += acc;
    }
}

// y += M^T v.
void add_matvec_t(const Tensor &m, std::span<const double> v,
                  std::span<double> y) {
    const std::size_t rows = m.shape[0];
    const std::size_t cols = m.shape[1];
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            y[j] += m[i * cols + j] * v[i];
        }
    }
}

// G += v u^T.
void add_outer(Tensor &g, std::span<const double> v, std::span<const double> u) {
    const std::size_t cols = g.shape[1];
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < u.size(); ++j) {
            g[i * cols + j] += v[i] * u[j];
        }
    }
}

void add_into(Tensor &g, std::span<const double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        g[i] += v[i];
    }
}

template <typename Self, typename F> void visit_tensors(Self &w, F &&f) {
    f("W_z", w.W_z);
    f("W_r", w.W_r);
    f("W_h", w.W_h);
    f("R_z", w.R_z);
    f("R_r", w.R_r);
    f("R_h", w.R_h);
    f("b_z", w.b_z);
    f("b_r", w.b_r);
    f("b_h", w.b_h);
    f("d_z", w.d_z);
    f("d_r", w.d_r);
    f("d_h", w.d_h);
    f("W_out", w.W_out);
    f("b_out", w.b_out);
}

struct CellCache {
    std::vector<double> x;
    std::vector<double> h_prev;
    std::vector<double> z;
    std::vector<double> r;
    std::vector<double> u; // R_h h_prev + d_h
    std::vector<double> hc;
    std::vector<double> h;
};

void check_shapes(const GruWeights &w, std::span<const double> x,
                  std::span<const double> h_prev) {
    if (x.size() != w.input_dim()) {
        throw std::invalid_argument("GRU input has " + std::to_string(x.size()) +
                                    " entries, expected " +
                                    std::to_string(w.input_dim()));
    }
    if (h_prev.size() != w.hidden_dim) {
        throw std::invalid_argument("GRU hidden state has " +
                                    std::to_string(h_prev.size()) +
                                    " entries, expected " +
                                    std::to_string(w.hidden_dim));
    }
}

CellCache cell_forward(const GruWeights &w, std::span<const double> x,
                       std::span<const double> h_prev) {
    check_shapes(w, x, h_prev);
    const std::size_t hd = w.hidden_dim;
    CellCache c;
    c.x.assign(x.begin(), x.end());
    c.h_prev.assign(h_prev.begin(), h_prev.end());

    c.z.assign(hd, 0.0);
    add_matvec(w.W_z, x, c.z);
    add_matvec(w.R_z, h_prev, c.z);
    c.r.assign(hd, 0.0);
    add_matvec(w.W_r, x, c.r);
    add_matvec(w.R_r, h_prev, c.r);
    c.u = w.d_h.values;
    add_matvec(w.R_h, h_prev, c.u);
    std::vector<double> a_h(hd, 0.0);
    add_matvec(w.W_h, x, a_h);

    c.hc.resize(hd);
    c.h.resize(hd);
    for (std::size_t i = 0; i < hd; ++i) {
        c.z[i] = sigmoid(c.z[i] + w.b_z[i] + w.d_z[i]);
        c.r[i] = sigmoid(c.r[i] + w.b_r[i] + w.d_r[i]);
        c.hc[i] = std::tanh(a_h[i] + c.r[i] * c.u[i] + w.b_h[i]);
        c.h[i] = c.z[i] * h_prev[i] + (1.0 - c.z[i]) * c.hc[i];
    }
    return c;
}

/// Backward through one cell. Accumulates weight gradients into g, returns
/// d/dh_prev and writes d/dx into dx.
std::vector<double> cell_backward(const GruWeights &w, const CellCache &c,
                                  std::span<const double> dh, GruWeights &g,
                                  std::vector<double> &dx) {
    const std::size_t hd = w.hidden_dim;
    std::vector<double> dh_prev(hd);
    std::vector<double> da_z(hd);
    std::vector<double> da_r(hd);
    std::vector<double> da_h(hd);
    std::vector<double> du(hd);
    for (std::size_t i = 0; i < hd; ++i) {
        const double dz = dh[i] * (c.h_prev[i] - c.hc[i]);
        const double dhc = dh[i] * (1.0 - c.z[i]);
        dh_prev[i] = dh[i] * c.z[i];
        da_h[i] = dhc * (1.0 - c.hc[i] * c.hc[i]);
        const double dr = da_h[i] * c.u[i];
        du[i] = da_h[i] * c.r[i];
        da_r[i] = dr * c.r[i] * (1.0 - c.r[i]);
        da_z[i] = dz * c.z[i] * (1.0 - c.z[i]);
    }

    add_outer(g.W_h, da_h, c.x);
    add_into(g.b_h, da_h);
    add_outer(g.R_h, du, c.h_prev);
    add_into(g.d_h, du);

    add_outer(g.W_r, da_r, c.x);
    add_outer(g.R_r, da_r, c.h_prev);
    add_into(g.b_r, da_r);
    add_into(g.d_r, da_r);

    add_outer(g.W_z, da_z, c.x);
    add_outer(g.R_z, da_z, c.h_prev);
    add_into(g.b_z, da_z);
    add_into(g.d_z, da_z);

    add_matvec_t(w.R_h, du, dh_prev);
    add_matvec_t(w.R_r, da_r, dh_prev);
    add_matvec_t(w.R_z, da_z, dh_prev);

    dx.assign(w.input_dim(), 0.0);
    add_matvec_t(w.W_h, da_h, dx);
    add_matvec_t(w.W_r, da_r, dx);
    add_matvec_t(w.W_z, da_z, dx);
    return dh_prev;
}

double energy_scale(const QaoaObjective &objective) {
    return std::max<double>(1.0, static_cast<double>(
                                     objective.graph().n_edges()));
}

std::vector<double> make_input(std::span<const double> theta, double energy,
                               double scale) {
    std::vector<double> x(theta.begin(), theta.end());
    x.push_back(energy / scale);
    return x;
}

QaoaParams depth1(std::span<const double> theta) {
    return QaoaParams::unflatten(theta);
}

/// Forward rollout keeping the caches needed by BPTT.
struct Rollout {
    MetaEpisode episode;
    std::vector<CellCache> cells;
    std::vector<std::vector<double>> energy_grads; // dE/dtheta_t
};

Rollout rollout(const GruWeights &w, const QaoaObjective &objective,
                std::span<const double> theta0, const EpisodeOptions &options,
                bool with_gradients) {
    if (options.horizon < 1) {
        throw std::invalid_argument("episode horizon must be >= 1");
    }
    if (theta0.size() != w.param_dim) {
        throw std::invalid_argument("theta0 size does not match the GRU");
    }
    const double scale = energy_scale(objective);
    Rollout out;
    auto evaluate = [&](std::span<const double> theta) {
        if (!with_gradients) {
            out.energy_grads.emplace_back();
            return objective.energy(depth1(theta));
        }
        EnergyGradient g;
        const double e = objective.energy_and_gradient(depth1(theta), g);
        out.energy_grads.push_back(g.flatten());
        return e;
    };

    std::vector<double> theta(theta0.begin(), theta0.end());
    std::vector<double> hidden(w.hidden_dim, 0.0);
    double energy = evaluate(theta);
    out.episode.records.push_back({theta, energy, hidden});
    const std::vector<double> x0 = make_input(theta, energy, scale);

    for (std::size_t t = 0; t < options.horizon; ++t) {
        const auto x = options.feed_initial_input
                           ? x0
                           : make_input(theta, energy, scale);
        CellCache cell = cell_forward(w, x, hidden);
        hidden = cell.h;
        std::vector<double> next = theta;
        add_matvec(w.W_out, hidden, next);
        for (std::size_t k = 0; k < next.size(); ++k) {
            next[k] += w.b_out[k];
        }
        theta = std::move(next);
        energy = evaluate(theta);
        out.episode.records.push_back({theta, energy, hidden});
        out.cells.push_back(std::move(cell));
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

GruWeights GruWeights::zeros(std::size_t hidden, std::size_t param) {
    if (hidden == 0 || param == 0) {
        throw std::invalid_argument("GRU dimensions must be positive");
    }
    GruWeights w;
    w.hidden_dim = hidden;
    w.param_dim = param;
    const std::size_t in = param + 1;
    w.W_z = w.W_r = w.W_h = Tensor({hidden, in});
    w.R_z = w.R_r = w.R_h = Tensor({hidden, hidden});
    w.b_z = w.b_r = w.b_h = w.d_z = w.d_r = w.d_h = Tensor({hidden});
    w.W_out = Tensor({param, hidden});
    w.b_out = Tensor({param});
    return w;
}

GruWeights GruWeights::random(std::size_t hidden, std::uint64_t seed,
                              double scale, std::size_t param) {
    GruWeights w = zeros(hidden, param);
    Rng rng(seed);
    visit_tensors(w, [&](const char *, Tensor &t) {
        for (auto &v : t.values) {
            v = rng.uniform(-scale, scale);
        }
    });
    return w;
}

NamedTensors GruWeights::named() const {
    NamedTensors out;
    visit_tensors(*this, [&](const char *name, const Tensor &t) {
        out.emplace_back(name, t);
    });
    return out;
}

void GruWeights::assign(const NamedTensors &tensors) {
    std::size_t i = 0;
    visit_tensors(*this, [&](const char *name, Tensor &t) {
        if (i >= tensors.size() || tensors[i].first != name ||
            tensors[i].second.shape != t.shape) {
            throw std::invalid_argument(std::string("GRU tensor mismatch at ") +
                                        name);
        }
        t = tensors[i++].second;
    });
}

std::vector<double> GruWeights::flat() const { return flatten(named()); }

void GruWeights::assign_flat(const std::vector<double> &flat) {
    NamedTensors tensors = named();
    unflatten_into(tensors, flat);
    assign(tensors);
}

Checkpoint GruWeights::to_checkpoint(nlohmann::json metadata) const {
    Checkpoint ckpt;
    ckpt.kind = "gru";
    ckpt.metadata = metadata.is_null() ? nlohmann::json::object()
                                       : std::move(metadata);
    ckpt.metadata["hidden_dim"] = hidden_dim;
    ckpt.metadata["param_dim"] = param_dim;
    ckpt.arrays = named();
    return ckpt;
}

GruWeights GruWeights::from_checkpoint(const Checkpoint &ckpt,
                                       std::size_t expected_hidden,
                                       std::size_t param_dim) {
    require_kind(ckpt, "gru");
    GruWeights w = zeros(expected_hidden, param_dim);
    visit_tensors(w, [&](const char *name, Tensor &t) {
        t = require_array(ckpt, name, t.shape);
    });
    for (const auto &v : w.flat()) {
        if (!std::isfinite(v)) {
            throw CheckpointError(CheckpointError::Kind::Corrupt,
                                  "GRU checkpoint holds non-finite weights");
        }
    }
    return w;
}

std::vector<double> gru_cell_forward(const GruWeights &w,
                                     std::span<const double> x,
                                     std::span<const double> h_prev) {
    return cell_forward(w, x, h_prev).h;
}

MetaStepResult gru_meta_step(const GruWeights &w,
                             std::span<const double> theta, double energy,
                             double scale, std::span<const double> hidden) {
    if (theta.size() != w.param_dim) {
        throw std::invalid_argument("theta size does not match the GRU");
    }
    MetaStepResult out;
    out.hidden = gru_cell_forward(w, make_input(theta, energy, scale), hidden);
    out.theta.assign(theta.begin(), theta.end());
    add_matvec(w.W_out, out.hidden, out.theta);
    for (std::size_t k = 0; k < out.theta.size(); ++k) {
        out.theta[k] += w.b_out[k];
    }
    return out;
}

std::vector<double> MetaEpisode::energies() const {
    std::vector<double> e;
    e.reserve(records.size());
    for (const auto &r : records) {
        e.push_back(r.energy);
    }
    return e;
}

std::size_t MetaEpisode::best_index() const {
    std::size_t best = 0;
    for (std::size_t t = 1; t < records.size(); ++t) {
        if (records[t].energy > records[best].energy) {
            best = t;
        }
    }
    return best;
}

QaoaParams MetaEpisode::best_params() const {
    return depth1(records[best_index()].theta);
}

MetaEpisode run_episode_from(const GruWeights &w,
                             const QaoaObjective &objective,
                             std::span<const double> theta0,
                             const EpisodeOptions &options) {
    return rollout(w, objective, theta0, options, false).episode;
}

MetaEpisode run_episode(const GruWeights &w, const QaoaObjective &objective,
                        std::uint64_t seed, const EpisodeOptions &options) {
    const auto theta0 = random_params(1, seed).flatten();
    return run_episode_from(w, objective, theta0, options);
}

double gru_loss(std::span<const double> energies) {
    if (energies.size() < 2) {
        throw std::invalid_argument("gru_loss needs at least two energies");
    }
    double best = energies[0];
    double gain = 0.0;
    for (std::size_t t = 1; t < energies.size(); ++t) {
        gain += std::max(energies[t] - best, 0.0);
        best = std::max(best, energies[t]);
    }
    return -gain;
}

double gru_loss(const MetaEpisode &episode) {
    return gru_loss(episode.energies());
}

EpisodeGradient episode_loss_and_gradient(const GruWeights &w,
                                          const QaoaObjective &objective,
                                          std::span<const double> theta0,
                                          const EpisodeOptions &options) {
    Rollout ro = rollout(w, objective, theta0, options, true);
    const auto energies = ro.episode.energies();
    const std::size_t horizon = options.horizon;
    const double scale = energy_scale(objective);

    // d loss / d E_t from the clipped-improvement sum; ties resolve to the
    // earliest maximizer, matching the forward running max.
    std::vector<double> dloss_de(energies.size(), 0.0);
    std::size_t arg_best = 0;
    for (std::size_t t = 1; t < energies.size(); ++t) {
        if (energies[t] > energies[arg_best]) {
            dloss_de[t] -= 1.0;
            dloss_de[arg_best] += 1.0;
            arg_best = t;
        }
    }

    GruWeights g = GruWeights::zeros(w.hidden_dim, w.param_dim);
    const std::size_t pd = w.param_dim;
    std::vector<double> dtheta(pd, 0.0);
    for (std::size_t k = 0; k < pd; ++k) {
        dtheta[k] = dloss_de[horizon] * ro.energy_grads[horizon][k];
    }
    std::vector<double> dh(w.hidden_dim, 0.0);
    std::vector<double> dx;

    for (std::size_t t = horizon; t-- > 0;) {
        // theta_{t+1} = theta_t + W_out h_{t+1} + b_out
        const CellCache &cell = ro.cells[t];
        add_outer(g.W_out, dtheta, cell.h);
        add_into(g.b_out, dtheta);
        add_matvec_t(w.W_out, dtheta, dh);

        dh = cell_backward(w, cell, dh, g, dx);

        if (!options.feed_initial_input) {
            // x_t = (theta_t, E_t / scale)
            for (std::size_t k = 0; k < pd; ++k) {
                dtheta[k] += dx[k];
            }
            const double de = dloss_de[t] + dx[pd] / scale;
            if (t > 0) {
                for (std::size_t k = 0; k < pd; ++k) {
                    dtheta[k] += de * ro.energy_grads[t][k];
                }
            }
        } else if (t > 0) {
            for (std::size_t k = 0; k < pd; ++k) {
                dtheta[k] += dloss_de[t] * ro.energy_grads[t][k];
            }
        }
    }

    EpisodeGradient out;
    out.loss = gru_loss(energies);
    out.grad = g.flat();
    out.episode = std::move(ro.episode);
    return out;
}

GruTrainResult train_gru(GruWeights weights, std::span<const Graph> graphs,
                         const GruTrainOptions &options) {
    if (graphs.empty()) {
        throw std::invalid_argument("train_gru: empty training set");
    }
    if (options.batch_size == 0) {
        throw std::invalid_argument("train_gru: batch size must be positive");
    }
    std::vector<QaoaObjective> objectives;
    objectives.reserve(graphs.size());
    for (const auto &g : graphs) {
        objectives.emplace_back(g);
    }

    std::vector<double> flat = weights.flat();
    OptimizerState adam(OptimizerKind::Adam, flat.size(),
                        {.learning_rate = options.meta_lr});
    GruTrainResult result;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        std::vector<std::size_t> order(graphs.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        Rng(derive_seed(options.seed, {0x5348, std::uint64_t(epoch)}))
            .shuffle(order);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += options.batch_size) {
            const std::size_t stop =
                std::min(order.size(), start + options.batch_size);
            std::vector<double> batch_grad(flat.size(), 0.0);
            for (std::size_t k = start; k < stop; ++k) {
                const std::size_t gi = order[k];
                const auto theta0 =
                    random_params(1, derive_seed(options.seed,
                                                 {std::uint64_t(epoch), gi}))
                        .flatten();
                const auto eg = episode_loss_and_gradient(
                    weights, objectives[gi], theta0, options.episode);
                if (!std::isfinite(eg.loss)) {
                    throw NumericError("train_gru: non-finite loss at epoch " +
                                       std::to_string(epoch) + ", graph " +
                                       std::to_string(gi));
                }
                epoch_loss += eg.loss;
                for (std::size_t i = 0; i < flat.size(); ++i) {
                    batch_grad[i] -= eg.grad[i];
                }
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            for (auto &v : batch_grad) {
                v *= inv;
            }
            // Ascent on -loss.
            optimizer_step(adam, flat, batch_grad);
            weights.assign_flat(flat);
        }
        result.loss_history.push_back(epoch_loss /
                                      static_cast<double>(graphs.size()));
    }
    result.weights = std::move(weights);
    return result;
}

Depth1Run gru_depth1_run(const GruWeights &gru, const QaoaObjective &objective,
                         std::uint64_t seed, const Depth1Options &options) {
    const MetaEpisode ep = run_episode(gru, objective, seed, options.episode);
    Depth1Run run{ep.best_params(), {}, {}};
    run.refinement = maximize(objective, run.initial, options.refine);
    run.params = symmetry_reduce(run.refinement.best().params);
    return run;
}

} // namespace qaoa
