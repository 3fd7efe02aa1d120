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
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qaoa/simulator.hpp"

namespace qaoa {

enum class OptimizerKind { Adam, RmsProp, Adagrad };

/// Accepts "adam", "rmsprop", "adagrad". @throws std::invalid_argument.
OptimizerKind parse_optimizer_kind(std::string_view tag);
std::string_view to_string(OptimizerKind kind);

struct OptimizerHyperparams {
    double learning_rate = 0.1;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double rmsprop_decay = 0.99;
    double rmsprop_epsilon = 1e-8;
    double adagrad_epsilon = 1e-10;
};

/**
 * @brief Moments of a first-order method over a fixed parameter dimension.
 *
 * Updates move in the ascent direction: params += lr * preconditioned grad.
 * Callers that minimize pass the negated gradient.
 */
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::Adam;
    OptimizerHyperparams hyper;
    std::uint64_t step_count = 0;
    /// Adam first moment; unused otherwise.
    std::vector<double> first_moment;
    /// Adam/RMSProp second moment, or the Adagrad accumulator.
    std::vector<double> second_moment;

    OptimizerState() = default;
    OptimizerState(OptimizerKind kind, std::size_t dim,
                   OptimizerHyperparams hyper = {});

    [[nodiscard]] std::size_t dim() const { return second_moment.size(); }
};

/// In-place ascent step.
/// @throws std::invalid_argument on dimension mismatch.
/// @throws NumericError if grad has a non-finite entry.
void optimizer_step(OptimizerState &state, std::span<double> params,
                    std::span<const double> grad);

struct TraceEntry {
    QaoaParams params;
    double energy = 0.0;
};

struct OptimizationTrace {
    std::vector<TraceEntry> entries;
    std::size_t best_index = 0;
    std::uint64_t gradient_evaluations = 0;
    std::uint64_t iterations = 0;
    double wall_ms = 0.0;

    [[nodiscard]] const TraceEntry &best() const { return entries[best_index]; }
    [[nodiscard]] const TraceEntry &last() const { return entries.back(); }
    /// Running maximum of the recorded energies.
    [[nodiscard]] std::vector<double> best_so_far() const;
};

struct MaximizeOptions {
    OptimizerKind method = OptimizerKind::Adam;
    OptimizerHyperparams hyper;
    /// Maximum number of optimizer steps.
    int budget = 200;
    /// Stop once |E_t - E_{t-1}| < tol.
    double tol = 1e-6;
    GradientMethod gradient = GradientMethod::Adjoint;
};

/**
 * @brief Gradient ascent on E_L from init. The trace holds init plus one
 * entry per step; best() is the best-so-far point that benchmarks report.
 */
OptimizationTrace maximize(const QaoaObjective &objective,
                           const QaoaParams &init,
                           const MaximizeOptions &options);

/// Uniform gamma in [0, 2 pi), beta in [0, pi), gammas drawn first.
QaoaParams random_params(std::size_t depth, std::uint64_t seed);

} // namespace qaoa
