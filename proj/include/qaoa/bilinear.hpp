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
 * @file Depth-progressive bilinear extrapolation of QAOA angles.
 *
 * For each of the gamma and beta sequences, with theta_{l-1} and theta_{l-2}
 * the refined angles at the two previous depths:
 *
 *   theta_l^j = 2 theta_{l-1}^j - theta_{l-2}^j            j <= l-2
 *   theta_l^j = 2 theta_{l-1}^{l-1} - theta_{l-2}^{l-2}    j = l-1, l
 *
 * The Successor variant instead continues the last layer's trend:
 *
 *   theta_l^{l-1} = theta_{l-1}^{l-1} + (theta_{l-1}^{l-2} - theta_{l-2}^{l-2})
 *   theta_l^l     = 2 theta_{l-1}^{l-1} - theta_{l-2}^{l-2}
 */
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qaoa/cnn_predictor.hpp"
#include "qaoa/meta_gru.hpp"
#include "qaoa/optimizers.hpp"
#include "qaoa/simulator.hpp"

namespace qaoa {

enum class ExtrapolationVariant { SharedTail, Successor };

/// "shared-tail" or "successor"; @throws ConfigError otherwise.
ExtrapolationVariant parse_extrapolation_variant(std::string_view name);
std::string to_string(ExtrapolationVariant variant);

/**
 * @brief Depth-l angles from depths l-1 and l-2.
 * @throws std::invalid_argument unless depth(prev) == depth(prev2) + 1 >= 2.
 */
QaoaParams bilinear_extrapolate(
    const QaoaParams &prev, const QaoaParams &prev2,
    ExtrapolationVariant variant = ExtrapolationVariant::SharedTail);

struct DepthEntry {
    std::size_t depth = 0;
    QaoaParams initial;
    QaoaParams refined;
    double initial_energy = 0.0;
    double energy = 0.0;
    double ratio = 0.0;
    std::size_t gradient_evaluations = 0;
    std::size_t iterations = 0;
};

struct DepthSchedule {
    double c_max = 0.0;
    std::vector<DepthEntry> entries; // depths 1, 2, ...

    [[nodiscard]] const DepthEntry &at_depth(std::size_t depth) const;
};

struct ProgressiveOptions {
    std::size_t max_depth = 12;
    Depth1Options depth1;
    /// Refinement applied at depths >= 2.
    MaximizeOptions refine{.hyper = {.learning_rate = 0.01},
                           .budget = 300,
                           .tol = 1e-7};
    ExtrapolationVariant variant = ExtrapolationVariant::SharedTail;
};

/**
 * @brief GRU depth 1 (refined), CNN depth 2 from the folded depth-1 angles
 * (refined), then extrapolate-and-refine for l = 3..max_depth.
 * @param seed seeds the GRU episode start.
 * @throws std::invalid_argument if max_depth < 2.
 */
DepthSchedule depth_progressive_run(const QaoaObjective &objective,
                                    const GruWeights &gru,
                                    const CnnWeights &cnn, std::uint64_t seed,
                                    const ProgressiveOptions &options = {});

/// Random canonical start at `depth` followed by one refinement.
DepthEntry random_init_run(const QaoaObjective &objective, std::size_t depth,
                           std::uint64_t seed, const MaximizeOptions &refine,
                           double c_max);

} // namespace qaoa
