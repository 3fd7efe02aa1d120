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
 * @file Convolutional predictor of depth-2 QAOA angles from depth-1 angles.
 *
 * Shapes (channels x rows x cols):
 *   input (gamma_1; beta_1)            1 x 2 x 1
 *   conv1 2x2, pad 1, ReLU            16 x 3 x 2
 *   conv2 2x2, pad 1, ReLU            64 x 4 x 3
 *   conv3 3x2, no pad, linear          1 x 2 x 2  = (gamma_1, gamma_2; beta_1, beta_2)
 */
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "qaoa/checkpoint.hpp"
#include "qaoa/graph.hpp"
#include "qaoa/meta_gru.hpp"
#include "qaoa/optimizers.hpp"
#include "qaoa/simulator.hpp"
#include "qaoa/tensor.hpp"

namespace qaoa {

/// Depth-1 angles (gamma_1, beta_1).
using Theta1 = std::array<double, 2>;
/// Depth-2 angles in QaoaParams::flatten order (gamma_1, gamma_2, beta_1, beta_2).
using Theta2 = std::array<double, 4>;

struct CnnWeights {
    Tensor conv1_w{{16, 1, 2, 2}};
    Tensor conv1_b{{16}};
    Tensor conv2_w{{64, 16, 2, 2}};
    Tensor conv2_b{{64}};
    Tensor conv3_w{{1, 64, 3, 2}};
    Tensor conv3_b{{1}};

    static CnnWeights zeros() { return {}; }
    /// Uniform in +-1/sqrt(fan_in) for every weight and bias.
    static CnnWeights random(std::uint64_t seed);

    [[nodiscard]] NamedTensors named() const;
    void assign(const NamedTensors &tensors);
    [[nodiscard]] std::vector<double> flat() const;
    void assign_flat(const std::vector<double> &flat);

    [[nodiscard]] Checkpoint to_checkpoint(nlohmann::json metadata = {}) const;
    static CnnWeights from_checkpoint(const Checkpoint &ckpt);

    bool operator==(const CnnWeights &) const = default;
};

/// Activations of one forward pass, each tensor shaped (channels, rows, cols).
struct CnnTrace {
    Tensor input;
    Tensor conv1; // after ReLU
    Tensor conv2; // after ReLU
    Tensor output;
};

/// @throws NumericError for non-finite input.
CnnTrace cnn_forward_trace(const CnnWeights &w, const Theta1 &theta1);
Theta2 cnn_forward(const CnnWeights &w, const Theta1 &theta1);
QaoaParams cnn_predict(const CnnWeights &w, const QaoaParams &depth1);

struct CnnSample {
    Theta1 input;
    Theta2 label;
};

/// Mean over samples of the squared Euclidean distance.
/// @throws std::invalid_argument on a count mismatch.
double cnn_loss(std::span<const Theta2> predictions,
                std::span<const Theta2> labels);

struct CnnGradient {
    double loss = 0.0;
    /// d loss / d weights in CnnWeights::flat() order.
    std::vector<double> grad;
};

CnnGradient cnn_loss_and_gradient(const CnnWeights &w,
                                  std::span<const CnnSample> samples);

using CnnGradientFn = std::function<CnnGradient(
    const CnnWeights &, std::span<const CnnSample>)>;

struct GradientCheckReport {
    std::vector<std::size_t> indices;
    std::vector<double> analytic;
    std::vector<double> numeric;
    /// Weights passed over because a ReLU changes state within +-h.
    std::size_t skipped = 0;
    double max_relative_error = 0.0;
};

/**
 * @brief Compares gradient_fn against central differences on `count`
 * randomly chosen weights. Relative error is |a - n| / max(|a|, |n|, 1e-6).
 * Weights whose +-h probes flip any ReLU are skipped and replaced by the
 * next random draw.
 */
GradientCheckReport cnn_weight_gradient_check(
    const CnnWeights &w, std::span<const CnnSample> samples,
    std::size_t count = 20, std::uint64_t seed = 0, double h = 1e-4,
    const CnnGradientFn &gradient_fn = cnn_loss_and_gradient);

struct CnnTrainOptions {
    int epochs = 50;
    std::size_t batch_size = 6;
    double learning_rate = 1e-4;
    std::uint64_t seed = 0;
};

struct CnnTrainResult {
    CnnWeights weights;
    /// Sample-weighted mean of the mini-batch losses seen during each epoch.
    std::vector<double> loss_history;
};

/// @throws std::invalid_argument for an empty dataset.
/// @throws NumericError on a non-finite loss.
CnnTrainResult train_cnn(CnnWeights weights, std::span<const CnnSample> samples,
                         const CnnTrainOptions &options);

// ---------------------------------------------------------------------------
// Depth-2 training data.

struct Depth2Sample {
    Graph graph;
    Theta1 theta1{};
    Theta2 theta2_star{};
    double label_energy = 0.0;
    double c_max = 0.0;
};

struct Depth2Dataset {
    std::vector<Depth2Sample> samples;

    [[nodiscard]] std::vector<CnnSample> cnn_samples() const;
};

nlohmann::json to_json(const Depth2Dataset &data);
/// @throws ConfigError on malformed input.
Depth2Dataset dataset_from_json(const nlohmann::json &doc);
void save_dataset(const Depth2Dataset &data, const std::filesystem::path &path);
Depth2Dataset load_dataset(const std::filesystem::path &path);

struct LabelOptions {
    std::size_t restarts = 50;
    MaximizeOptions search{.hyper = {}, .budget = 300};
    /// Restarts within tie_tolerance * c_max of the best energy count as
    /// optimal; the one with the smallest folded angle norm is the label.
    double tie_tolerance = 1e-4;
    Depth1Options depth1;
};

/**
 * @brief For each graph: the best of `restarts` depth-2 maximizations from
 * random canonical starts (folded by symmetry_reduce) as the label, and the
 * GRU depth-1 parameters as the feature. Depth-2 optima are often
 * degenerate; see LabelOptions::tie_tolerance.
 * @throws std::invalid_argument when restarts == 0.
 */
Depth2Dataset make_depth2_labels(std::span<const Graph> graphs,
                                 const GruWeights &gru, std::uint64_t seed,
                                 const LabelOptions &options = {});

} // namespace qaoa
