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
#include "qaoa/bilinear.hpp"

#include <stdexcept>

#include "qaoa/errors.hpp"

namespace qaoa {

namespace {

std::vector<double> extrapolate(const std::vector<double> &a,
                                const std::vector<double> &b,
                                ExtrapolationVariant variant) {
    const std::size_t l = a.size() + 1;
    std::vector<double> out(l);
    for (std::size_t j = 0; j + 2 < l; ++j) {
        out[j] = 2.0 * a[j] - b[j];
    }
    const double diagonal = 2.0 * a[l - 2] - b[l - 3];
    out[l - 1] = diagonal;
    if (variant == ExtrapolationVariant::SharedTail) {
        out[l - 2] = diagonal;
    } else {
        out[l - 2] = a[l - 2] + (a[l - 3] - b[l - 3]);
    }
    return out;
}

DepthEntry make_entry(std::size_t depth, const QaoaParams &initial,
                      const OptimizationTrace &trace, double c_max) {
    DepthEntry e;
    e.depth = depth;
    e.initial = initial;
    e.initial_energy = trace.entries.front().energy;
    e.refined = trace.best().params;
    e.energy = trace.best().energy;
    e.ratio = approximation_ratio(e.energy, c_max);
    e.gradient_evaluations = trace.gradient_evaluations;
    e.iterations = trace.iterations;
    return e;
}

} // namespace

ExtrapolationVariant parse_extrapolation_variant(std::string_view name) {
    if (name == "shared-tail") {
        return ExtrapolationVariant::SharedTail;
    }
    if (name == "successor") {
        return ExtrapolationVariant::Successor;
    }
    throw ConfigError("unknown extrapolation variant '" + std::string(name) +
                      "' (expected shared-tail or successor)");
}

std::string to_string(ExtrapolationVariant variant) {
    return variant == ExtrapolationVariant::SharedTail ? "shared-tail"
                                                      : "successor";
}

QaoaParams bilinear_extrapolate(const QaoaParams &prev, const QaoaParams &prev2,
                                ExtrapolationVariant variant) {
    if (prev2.depth() < 1 || prev.depth() != prev2.depth() + 1) {
        throw std::invalid_argument(
            "bilinear_extrapolate needs depths l-1 and l-2 with l >= 3, got " +
            std::to_string(prev.depth()) + " and " +
            std::to_string(prev2.depth()));
    }
    return {extrapolate(prev.gammas, prev2.gammas, variant),
            extrapolate(prev.betas, prev2.betas, variant)};
}

const DepthEntry &DepthSchedule::at_depth(std::size_t depth) const {
    if (depth == 0 || depth > entries.size()) {
        throw std::out_of_range("schedule has no depth " +
                                std::to_string(depth));
    }
    return entries[depth - 1];
}

DepthSchedule depth_progressive_run(const QaoaObjective &objective,
                                    const GruWeights &gru,
                                    const CnnWeights &cnn, std::uint64_t seed,
                                    const ProgressiveOptions &options) {
    if (options.max_depth < 2) {
        throw std::invalid_argument("depth_progressive_run needs max_depth >= 2");
    }
    DepthSchedule schedule;
    schedule.c_max = brute_force_max_cut(objective.graph()).c_max;

    const Depth1Run d1 = gru_depth1_run(gru, objective, seed, options.depth1);
    schedule.entries.push_back(
        make_entry(1, d1.initial, d1.refinement, schedule.c_max));

    // Later depths build on the folded depth-1 angles the CNN was trained on.
    QaoaParams prev2 = d1.params;
    const QaoaParams start2 = cnn_predict(cnn, d1.params);
    const auto trace2 = maximize(objective, start2, options.refine);
    schedule.entries.push_back(make_entry(2, start2, trace2, schedule.c_max));
    QaoaParams prev = trace2.best().params;

    for (std::size_t l = 3; l <= options.max_depth; ++l) {
        const QaoaParams start = bilinear_extrapolate(prev, prev2, options.variant);
        const auto trace = maximize(objective, start, options.refine);
        schedule.entries.push_back(make_entry(l, start, trace, schedule.c_max));
        prev2 = std::move(prev);
        prev = trace.best().params;
    }
    return schedule;
}

DepthEntry random_init_run(const QaoaObjective &objective, std::size_t depth,
                           std::uint64_t seed, const MaximizeOptions &refine,
                           double c_max) {
    const QaoaParams start = random_params(depth, seed);
    return make_entry(depth, start, maximize(objective, start, refine), c_max);
}

} // namespace qaoa
