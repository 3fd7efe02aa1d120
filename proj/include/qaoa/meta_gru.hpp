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
 * @file GRU meta-optimizer for depth-1 QAOA angles.
 *
 * Cell (input x, previous hidden h):
 *   z  = sigmoid(W_z x + R_z h + b_z + d_z)
 *   r  = sigmoid(W_r x + R_r h + b_r + d_r)
 *   hc = tanh(W_h x + r * (R_h h + d_h) + b_h)
 *   h' = z * h + (1 - z) * hc
 *
 * Meta step: x_t = (theta_t, E_t / |E|), h_{t+1} = cell(x_t, h_t),
 * theta_{t+1} = theta_t + W_out h_{t+1} + b_out.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qaoa/checkpoint.hpp"
#include "qaoa/graph.hpp"
#include "qaoa/optimizers.hpp"
#include "qaoa/simulator.hpp"
#include "qaoa/tensor.hpp"

namespace qaoa {

struct GruWeights {
    std::size_t hidden_dim = 0;
    std::size_t param_dim = 0;
    Tensor W_z, W_r, W_h; // hidden x input
    Tensor R_z, R_r, R_h; // hidden x hidden
    Tensor b_z, b_r, b_h;
    Tensor d_z, d_r, d_h;
    Tensor W_out; // param x hidden
    Tensor b_out; // param

    [[nodiscard]] std::size_t input_dim() const { return param_dim + 1; }

    static GruWeights zeros(std::size_t hidden_dim, std::size_t param_dim = 2);
    /// Every entry uniform in [-scale, scale].
    static GruWeights random(std::size_t hidden_dim, std::uint64_t seed,
                             double scale = 0.08, std::size_t param_dim = 2);

    /// Tensors in checkpoint order.
    [[nodiscard]] NamedTensors named() const;
    void assign(const NamedTensors &tensors);
    [[nodiscard]] std::vector<double> flat() const;
    void assign_flat(const std::vector<double> &flat);

    [[nodiscard]] Checkpoint to_checkpoint(nlohmann::json metadata = {}) const;
    /// @throws CheckpointError if shapes disagree with expected_hidden.
    static GruWeights from_checkpoint(const Checkpoint &ckpt,
                                      std::size_t expected_hidden,
                                      std::size_t param_dim = 2);

    bool operator==(const GruWeights &) const = default;
};

/// @throws std::invalid_argument on shape mismatch.
std::vector<double> gru_cell_forward(const GruWeights &w,
                                     std::span<const double> x,
                                     std::span<const double> h_prev);

struct MetaStepResult {
    std::vector<double> theta;
    std::vector<double> hidden;
};

/// One proposal step; energy_scale normalizes the energy input.
MetaStepResult gru_meta_step(const GruWeights &w,
                             std::span<const double> theta, double energy,
                             double energy_scale,
                             std::span<const double> hidden);

struct EpisodeOptions {
    std::size_t horizon = 10;
    /// Feed (theta_0, E_0) at every step instead of (theta_t, E_t).
    bool feed_initial_input = false;
};

struct MetaRecord {
    std::vector<double> theta;
    double energy = 0.0;
    std::vector<double> hidden;
};

struct MetaEpisode {
    std::vector<MetaRecord> records; // t = 0..T

    [[nodiscard]] std::size_t horizon() const { return records.size() - 1; }
    [[nodiscard]] std::vector<double> energies() const;
    [[nodiscard]] std::size_t best_index() const;
    /// Depth-1 parameters with the highest recorded energy.
    [[nodiscard]] QaoaParams best_params() const;
};

/// theta_0 from random_params(1, seed), h_0 = 0, T GRU steps.
MetaEpisode run_episode(const GruWeights &w, const QaoaObjective &objective,
                        std::uint64_t seed, const EpisodeOptions &options = {});

/// Same, starting from a given theta_0.
MetaEpisode run_episode_from(const GruWeights &w,
                             const QaoaObjective &objective,
                             std::span<const double> theta0,
                             const EpisodeOptions &options = {});

/**
 * @brief Negated cumulative clipped improvement,
 * -sum_{t>=1} max(E_t - max_{i<t} E_i, 0). Always <= 0.
 * @throws std::invalid_argument for fewer than two energies.
 */
double gru_loss(std::span<const double> energies);
double gru_loss(const MetaEpisode &episode);

struct EpisodeGradient {
    double loss = 0.0;
    /// d loss / d weights, in GruWeights::flat() order.
    std::vector<double> grad;
    MetaEpisode episode;
};

/// Loss of one episode and its gradient by backpropagation through time,
/// including the path through dE/dtheta of the simulator.
EpisodeGradient episode_loss_and_gradient(const GruWeights &w,
                                          const QaoaObjective &objective,
                                          std::span<const double> theta0,
                                          const EpisodeOptions &options = {});

struct GruTrainOptions {
    int epochs = 1000;
    double meta_lr = 1e-3;
    std::size_t batch_size = 10;
    EpisodeOptions episode;
    std::uint64_t seed = 0;
};

struct GruTrainResult {
    GruWeights weights;
    /// Mean episode loss per epoch.
    std::vector<double> loss_history;
};

/**
 * @brief Minimizes the mean episode loss with Adam on the GRU weights.
 * Graph order is reshuffled every epoch and episode starts derive from
 * (seed, epoch, graph index), so a fixed seed reproduces the run.
 * @throws std::invalid_argument for an empty training set.
 * @throws NumericError on a non-finite loss, naming epoch and graph.
 */
GruTrainResult train_gru(GruWeights weights, std::span<const Graph> graphs,
                         const GruTrainOptions &options);

struct Depth1Options {
    EpisodeOptions episode;
    /// Local refinement of the best episode iterate.
    MaximizeOptions refine{.hyper = {.learning_rate = 0.01},
                           .budget = 300,
                           .tol = 1e-7};
};

struct Depth1Run {
    /// Best episode iterate.
    QaoaParams initial;
    OptimizationTrace refinement;
    /// symmetry_reduce of the refined optimum.
    QaoaParams params;
};

/// GRU episode from random_params(1, seed), then local refinement.
Depth1Run gru_depth1_run(const GruWeights &gru, const QaoaObjective &objective,
                         std::uint64_t seed, const Depth1Options &options = {});

inline QaoaParams gru_depth1_params(const GruWeights &gru,
                                    const QaoaObjective &objective,
                                    std::uint64_t seed,
                                    const Depth1Options &options = {}) {
    return gru_depth1_run(gru, objective, seed, options).params;
}

} // namespace qaoa
