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
#include "qaoa/simulator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qaoa/errors.hpp"

namespace qaoa {

namespace {

// Plain complex product; avoids the NaN-recovery path of operator*.
inline Amplitude cmul(Amplitude a, Amplitude b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

void require_qubits(int n) {
    if (n < 1 || n > kMaxNodes) {
        throw ResourceLimitError("qubit count " + std::to_string(n) +
                                 " outside [1, " + std::to_string(kMaxNodes) +
                                 "]");
    }
}

/// exp(-i angle X) on one qubit: a0' = c a0 - i s a1, a1' = -i s a0 + c a1.
void apply_rx(std::span<Amplitude> amps, int qubit, double c, double s) {
    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Amplitude a0 = amps[i];
            const Amplitude a1 = amps[i + stride];
            amps[i] = {c * a0.real() + s * a1.imag(),
                       c * a0.imag() - s * a1.real()};
            amps[i + stride] = {s * a0.imag() + c * a1.real(),
                                -s * a0.real() + c * a1.imag()};
        }
    }
}

void apply_mixer(std::span<Amplitude> amps, int n_qubits, double beta) {
    const double c = std::cos(beta);
    const double s = std::sin(beta);
    for (int q = 0; q < n_qubits; ++q) {
        apply_rx(amps, q, c, s);
    }
}

double wrap_into(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0.0) {
        r += period;
    }
    return r >= period ? 0.0 : r;
}

} // namespace

// ---------------------------------------------------------------------------

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    require_qubits(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    require_qubits(n_qubits);
    if (amps_.size() != (std::size_t{1} << n_qubits)) {
        throw std::invalid_argument("amplitude count must be 2^n_qubits");
    }
}

double StateVector::squared_norm() const {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

QaoaParams::QaoaParams(std::vector<double> g, std::vector<double> b)
    : gammas(std::move(g)), betas(std::move(b)) {
    if (gammas.size() != betas.size()) {
        throw std::invalid_argument("gammas and betas differ in length");
    }
}

std::vector<double> QaoaParams::flatten() const {
    std::vector<double> flat(gammas);
    flat.insert(flat.end(), betas.begin(), betas.end());
    return flat;
}

QaoaParams QaoaParams::unflatten(std::span<const double> flat) {
    if (flat.size() % 2 != 0) {
        throw std::invalid_argument("flattened parameters must have even size");
    }
    const std::size_t depth = flat.size() / 2;
    return {std::vector<double>(flat.begin(), flat.begin() + depth),
            std::vector<double>(flat.begin() + depth, flat.end())};
}

std::vector<double> EnergyGradient::flatten() const {
    std::vector<double> flat(d_gamma);
    flat.insert(flat.end(), d_beta.begin(), d_beta.end());
    return flat;
}

GradientMethod parse_gradient_method(std::string_view tag) {
    if (tag == "parameter-shift") {
        return GradientMethod::ParameterShift;
    }
    if (tag == "finite-difference") {
        return GradientMethod::FiniteDifference;
    }
    if (tag == "adjoint") {
        return GradientMethod::Adjoint;
    }
    throw std::invalid_argument("unknown gradient method '" + std::string(tag) +
                                "'");
}

std::string_view to_string(GradientMethod method) {
    switch (method) {
    case GradientMethod::ParameterShift:
        return "parameter-shift";
    case GradientMethod::FiniteDifference:
        return "finite-difference";
    case GradientMethod::Adjoint:
        return "adjoint";
    }
    return "unknown";
}

StateVector prepare_uniform_state(int n) {
    require_qubits(n);
    const std::size_t dim = std::size_t{1} << n;
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    return {n, std::vector<Amplitude>(dim, Amplitude{amp, 0.0})};
}

void apply_cost_layer(StateVector &state, std::span<const double> cut_table,
                      double gamma) {
    if (cut_table.size() != state.dim()) {
        throw std::invalid_argument("cut table length does not match state");
    }
    auto amps = state.amplitudes();
    for (std::size_t b = 0; b < amps.size(); ++b) {
        amps[b] = cmul(amps[b], std::polar(1.0, -gamma * cut_table[b]));
    }
}

void apply_mixer_layer(StateVector &state, double beta) {
    apply_mixer(state.amplitudes(), state.n_qubits(), beta);
}

double expectation(const StateVector &state,
                   std::span<const double> cut_table) {
    if (cut_table.size() != state.dim()) {
        throw std::invalid_argument("cut table length does not match state");
    }
    const auto amps = state.amplitudes();
    double acc = 0.0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        acc += std::norm(amps[b]) * cut_table[b];
    }
    return acc;
}

double approximation_ratio(double energy, double c_max) {
    if (!(c_max > 0.0)) {
        throw std::invalid_argument("approximation ratio needs c_max > 0");
    }
    return energy / c_max;
}

QaoaParams wrap_canonical(const QaoaParams &params) {
    QaoaParams out = params;
    for (auto &g : out.gammas) {
        g = wrap_into(g, 2.0 * std::numbers::pi);
    }
    for (auto &b : out.betas) {
        b = wrap_into(b, std::numbers::pi);
    }
    return out;
}

QaoaParams symmetry_reduce(const QaoaParams &params) {
    QaoaParams out = params;
    if (!out.gammas.empty() &&
        wrap_into(out.gammas.front(), 2.0 * std::numbers::pi) >
            std::numbers::pi) {
        for (auto &g : out.gammas) {
            g = -g;
        }
        for (auto &b : out.betas) {
            b = -b;
        }
    }
    for (auto &g : out.gammas) {
        g = wrap_into(g, 2.0 * std::numbers::pi);
    }
    for (auto &b : out.betas) {
        b = wrap_into(b, 0.5 * std::numbers::pi);
    }
    return out;
}

// ---------------------------------------------------------------------------

struct QaoaObjective::Shift {
    enum class Kind { Edge, Qubit } kind;
    std::size_t layer;
    std::size_t index;
    double delta;
};

QaoaObjective::QaoaObjective(Graph graph)
    : graph_(std::move(graph)), cuts_(basis_cut_table(graph_)) {
    levels_.resize(cuts_.size());
    for (std::size_t b = 0; b < cuts_.size(); ++b) {
        levels_[b] = static_cast<std::uint32_t>(cuts_[b]);
        max_level_ = std::max(max_level_, levels_[b]);
    }
}

void QaoaObjective::apply_cost(StateVector &state, double gamma) const {
    // Cut values are integers, so exp(-i gamma C) takes max_level_ + 1 values.
    std::vector<Amplitude> phase(max_level_ + 1);
    for (std::uint32_t k = 0; k <= max_level_; ++k) {
        phase[k] = std::polar(1.0, -gamma * static_cast<double>(k));
    }
    auto amps = state.amplitudes();
    for (std::size_t b = 0; b < amps.size(); ++b) {
        amps[b] = cmul(amps[b], phase[levels_[b]]);
    }
}

StateVector QaoaObjective::evolve(const QaoaParams &params) const {
    if (params.gammas.size() != params.betas.size()) {
        throw std::invalid_argument("gammas and betas differ in length");
    }
    StateVector state = prepare_uniform_state(n_qubits());
    for (std::size_t l = 0; l < params.depth(); ++l) {
        apply_cost(state, params.gammas[l]);
        apply_mixer(state.amplitudes(), n_qubits(), params.betas[l]);
    }
    return state;
}

double QaoaObjective::energy(const QaoaParams &params) const {
    return expectation(evolve(params), cuts_);
}

double QaoaObjective::shifted_energy(const QaoaParams &params,
                                     const Shift &shift) const {
    const int n = n_qubits();
    StateVector state = prepare_uniform_state(n);
    auto amps = state.amplitudes();
    for (std::size_t l = 0; l < params.depth(); ++l) {
        apply_cost(state, params.gammas[l]);
        if (shift.layer == l && shift.kind == Shift::Kind::Edge) {
            // Extra exp(-i delta (1 - Z_u Z_v)/2): phase on states where the
            // edge is cut.
            const Edge e = graph_.edges()[shift.index];
            const Amplitude ph = std::polar(1.0, -shift.delta);
            for (std::size_t b = 0; b < amps.size(); ++b) {
                if ((((b >> e.u) ^ (b >> e.v)) & 1U) != 0U) {
                    amps[b] = cmul(amps[b], ph);
                }
            }
        }
        const double beta = params.betas[l];
        for (int q = 0; q < n; ++q) {
            double angle = beta;
            if (shift.layer == l && shift.kind == Shift::Kind::Qubit &&
                shift.index == static_cast<std::size_t>(q)) {
                angle += shift.delta;
            }
            apply_rx(amps, q, std::cos(angle), std::sin(angle));
        }
    }
    return expectation(state, cuts_);
}

EnergyGradient QaoaObjective::parameter_shift(const QaoaParams &p) const {
    // gamma_l: each edge term has generator (1 - Z Z)/2 with spectrum {0, 1},
    //   d/dgamma = [E(+pi/2) - E(-pi/2)] / 2 summed over edges.
    // beta_l: each qubit term exp(-i beta X) has generator X with spectrum
    //   {-1, 1}, d/dbeta = E(+pi/4) - E(-pi/4) summed over qubits.
    constexpr double kEdgeShift = std::numbers::pi / 2.0;
    constexpr double kQubitShift = std::numbers::pi / 4.0;
    EnergyGradient grad{std::vector<double>(p.depth(), 0.0),
                        std::vector<double>(p.depth(), 0.0)};
    for (std::size_t l = 0; l < p.depth(); ++l) {
        double dg = 0.0;
        for (std::size_t e = 0; e < graph_.n_edges(); ++e) {
            const double plus =
                shifted_energy(p, {Shift::Kind::Edge, l, e, kEdgeShift});
            const double minus =
                shifted_energy(p, {Shift::Kind::Edge, l, e, -kEdgeShift});
            dg += 0.5 * (plus - minus);
        }
        grad.d_gamma[l] = dg;

        double db = 0.0;
        for (int q = 0; q < n_qubits(); ++q) {
            const auto qi = static_cast<std::size_t>(q);
            const double plus =
                shifted_energy(p, {Shift::Kind::Qubit, l, qi, kQubitShift});
            const double minus =
                shifted_energy(p, {Shift::Kind::Qubit, l, qi, -kQubitShift});
            db += plus - minus;
        }
        grad.d_beta[l] = db;
    }
    return grad;
}

EnergyGradient QaoaObjective::finite_difference(const QaoaParams &p) const {
    std::vector<double> flat = p.flatten();
    std::vector<double> out(flat.size());
    for (std::size_t k = 0; k < flat.size(); ++k) {
        const double saved = flat[k];
        flat[k] = saved + kFiniteDifferenceStep;
        const double plus = energy(QaoaParams::unflatten(flat));
        flat[k] = saved - kFiniteDifferenceStep;
        const double minus = energy(QaoaParams::unflatten(flat));
        flat[k] = saved;
        out[k] = (plus - minus) / (2.0 * kFiniteDifferenceStep);
    }
    const auto mid = out.begin() + static_cast<std::ptrdiff_t>(p.depth());
    return {std::vector<double>(out.begin(), mid),
            std::vector<double>(mid, out.end())};
}

double QaoaObjective::energy_and_gradient(const QaoaParams &params,
                                          EnergyGradient &grad) const {
    const std::size_t depth = params.depth();
    const int n = n_qubits();
    StateVector phi = evolve(params);
    const double e = expectation(phi, cuts_);

    // lambda = H_C |phi>; dE/dtheta_k = 2 Im <lambda_k| G_k |phi_k>.
    StateVector lambda = phi;
    auto la = lambda.amplitudes();
    auto ph = phi.amplitudes();
    for (std::size_t b = 0; b < la.size(); ++b) {
        la[b] *= cuts_[b];
    }

    grad.d_gamma.assign(depth, 0.0);
    grad.d_beta.assign(depth, 0.0);
    for (std::size_t l = depth; l-- > 0;) {
        // Mixer: G = sum_q X_q.
        double im = 0.0;
        for (int q = 0; q < n; ++q) {
            const std::size_t bit = std::size_t{1} << q;
            for (std::size_t b = 0; b < la.size(); ++b) {
                const Amplitude x = ph[b ^ bit];
                im += la[b].real() * x.imag() - la[b].imag() * x.real();
            }
        }
        grad.d_beta[l] = 2.0 * im;
        apply_mixer(ph, n, -params.betas[l]);
        apply_mixer(la, n, -params.betas[l]);

        // Cost: G = H_C (diagonal).
        im = 0.0;
        for (std::size_t b = 0; b < la.size(); ++b) {
            im += cuts_[b] * (la[b].real() * ph[b].imag() -
                              la[b].imag() * ph[b].real());
        }
        grad.d_gamma[l] = 2.0 * im;
        apply_cost(phi, -params.gammas[l]);
        apply_cost(lambda, -params.gammas[l]);
    }
    return e;
}

EnergyGradient QaoaObjective::gradient(const QaoaParams &params,
                                       GradientMethod method) const {
    if (params.depth() == 0) {
        throw std::invalid_argument("gradient needs depth >= 1");
    }
    switch (method) {
    case GradientMethod::ParameterShift:
        return parameter_shift(params);
    case GradientMethod::FiniteDifference:
        return finite_difference(params);
    case GradientMethod::Adjoint: {
        EnergyGradient grad;
        energy_and_gradient(params, grad);
        return grad;
    }
    }
    throw std::invalid_argument("unknown gradient method");
}

StateVector evolve(const Graph &g, const QaoaParams &params) {
    return QaoaObjective(g).evolve(params);
}

EnergyGradient gradient(const Graph &g, const QaoaParams &params,
                        GradientMethod method) {
    return QaoaObjective(g).gradient(params, method);
}

} // namespace qaoa
