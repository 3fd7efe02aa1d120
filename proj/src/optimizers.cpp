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
#include "qaoa/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qaoa/errors.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {

OptimizerKind parse_optimizer_kind(std::string_view tag) {
    if (tag == "adam") {
        return OptimizerKind::Adam;
    }
    if (tag == "rmsprop") {
        return OptimizerKind::RmsProp;
    }
    if (tag == "adagrad") {
        return OptimizerKind::Adagrad;
    }
    throw std::invalid_argument("unknown optimizer '" + std::string(tag) + "'");
}

std::string_view to_string(OptimizerKind kind) {
    switch (kind) {
    case OptimizerKind::Adam:
        return "adam";
    case OptimizerKind::RmsProp:
        return "rmsprop";
    case OptimizerKind::Adagrad:
        return "adagrad";
    }
    return "unknown";
}

OptimizerState::OptimizerState(OptimizerKind k, std::size_t dim,
                               OptimizerHyperparams h)
    : kind(k), hyper(h), second_moment(dim, 0.0) {
    if (!(hyper.learning_rate > 0.0)) {
        throw std::invalid_argument("learning rate must be positive");
    }
    if (kind == OptimizerKind::Adam) {
        first_moment.assign(dim, 0.0);
    }
}

void optimizer_step(OptimizerState &state, std::span<double> params,
                    std::span<const double> grad) {
    if (params.size() != grad.size() || params.size() != state.dim()) {
        throw std::invalid_argument(
            "optimizer_step: params, grad and state dimensions differ (" +
            std::to_string(params.size()) + ", " + std::to_string(grad.size()) +
            ", " + std::to_string(state.dim()) + ")");
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!std::isfinite(grad[i])) {
            throw NumericError("optimizer_step: non-finite gradient at index " +
                               std::to_string(i));
        }
    }

    const auto &h = state.hyper;
    ++state.step_count;
    auto &v = state.second_moment;
    switch (state.kind) {
    case OptimizerKind::Adam: {
        auto &m = state.first_moment;
        const auto t = static_cast<double>(state.step_count);
        const double c1 = 1.0 - std::pow(h.adam_beta1, t);
        const double c2 = 1.0 - std::pow(h.adam_beta2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = h.adam_beta1 * m[i] + (1.0 - h.adam_beta1) * grad[i];
            v[i] = h.adam_beta2 * v[i] + (1.0 - h.adam_beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            params[i] += h.learning_rate * m_hat /
                         (std::sqrt(v_hat) + h.adam_epsilon);
        }
        break;
    }
    case OptimizerKind::RmsProp:
        for (std::size_t i = 0; i < params.size(); ++i) {
            v[i] = h.rmsprop_decay * v[i] +
                   (1.0 - h.rmsprop_decay) * grad[i] * grad[i];
            params[i] += h.learning_rate * grad[i] /
                         (std::sqrt(v[i]) + h.rmsprop_epsilon);
        }
        break;
    case OptimizerKind::Adagrad:
        for (std::size_t i = 0; i < params.size(); ++i) {
            v[i] += grad[i] * grad[i];
            params[i] += h.learning_rate * grad[i] /
                         (std::sqrt(v[i]) + h.adagrad_epsilon);
        }
        break;
    }
}

std::vector<double> OptimizationTrace::best_so_far() const {
    std::vector<double> out;
    out.reserve(entries.size());
    double best = -INFINITY;
    for (const auto &e : entries) {
        best = std::max(best, e.energy);
        out.push_back(best);
    }
    return out;
}

OptimizationTrace maximize(const QaoaObjective &objective,
                           const QaoaParams &init,
                           const MaximizeOptions &options) {
    if (options.budget < 1) {
        throw std::invalid_argument("maximize: budget must be >= 1");
    }
    const auto start = std::chrono::steady_clock::now();

    OptimizationTrace trace;
    std::vector<double> flat = init.flatten();
    OptimizerState state(options.method, flat.size(), options.hyper);

    auto energy_and_grad = [&](const QaoaParams &p, EnergyGradient &g) {
        ++trace.gradient_evaluations;
        if (options.gradient == GradientMethod::Adjoint) {
            return objective.energy_and_gradient(p, g);
        }
        g = objective.gradient(p, options.gradient);
        return objective.energy(p);
    };

    EnergyGradient grad;
    double energy = energy_and_grad(init, grad);
    trace.entries.push_back({init, energy});

    for (int it = 0; it < options.budget; ++it) {
        const std::vector<double> g = grad.flatten();
        optimizer_step(state, flat, g);
        ++trace.iterations;
        QaoaParams next = QaoaParams::unflatten(flat);

        const bool last = it + 1 == options.budget;
        double next_energy = 0.0;
        if (last) {
            next_energy = objective.energy(next);
        } else {
            next_energy = energy_and_grad(next, grad);
        }
        trace.entries.push_back({std::move(next), next_energy});
        if (next_energy > trace.entries[trace.best_index].energy) {
            trace.best_index = trace.entries.size() - 1;
        }
        const bool converged = std::abs(next_energy - energy) < options.tol;
        energy = next_energy;
        if (converged) {
            break;
        }
    }

    trace.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    return trace;
}

QaoaParams random_params(std::size_t depth, std::uint64_t seed) {
    Rng rng(seed);
    QaoaParams p;
    p.gammas.resize(depth);
    p.betas.resize(depth);
    for (auto &g : p.gammas) {
        g = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    for (auto &b : p.betas) {
        b = rng.uniform(0.0, std::numbers::pi);
    }
    return p;
}

} // namespace qaoa
