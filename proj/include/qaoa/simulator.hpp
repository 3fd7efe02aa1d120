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
 * @file Noise-free statevector engine for Max-Cut QAOA.
 *
 * The circuit at depth L is
 *   |psi> = prod_{l=1..L} exp(-i beta_l H_M) exp(-i gamma_l H_C) |+>^N
 * with the cost layer applied first in each round. H_C is diagonal with the
 * cut value of each basis state on its diagonal, so the cost layer is a
 * per-amplitude phase. The gate form CNOT (I x RZ(2 gamma)) CNOT per edge is
 * the same operator up to a global phase and is not executed.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qaoa/graph.hpp"

namespace qaoa {

using Amplitude = std::complex<double>;

class StateVector {
  public:
    /// Computational basis state |0...0>.
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, std::vector<Amplitude> amplitudes);

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }
    [[nodiscard]] std::span<Amplitude> amplitudes() { return amps_; }
    [[nodiscard]] std::span<const Amplitude> amplitudes() const {
        return amps_;
    }
    Amplitude &operator[](std::size_t i) { return amps_[i]; }
    const Amplitude &operator[](std::size_t i) const { return amps_[i]; }

    /// Sum of |amplitude|^2.
    [[nodiscard]] double squared_norm() const;

  private:
    int n_qubits_;
    std::vector<Amplitude> amps_;
};

/// Angles of a depth-L circuit. Unconstrained reals; see wrap_canonical.
struct QaoaParams {
    std::vector<double> gammas;
    std::vector<double> betas;

    QaoaParams() = default;
    /// @throws std::invalid_argument if the sequences differ in length.
    QaoaParams(std::vector<double> gammas, std::vector<double> betas);

    [[nodiscard]] std::size_t depth() const { return gammas.size(); }
    /// (gamma_1..gamma_L, beta_1..beta_L).
    [[nodiscard]] std::vector<double> flatten() const;
    static QaoaParams unflatten(std::span<const double> flat);

    bool operator==(const QaoaParams &) const = default;
};

struct EnergyGradient {
    std::vector<double> d_gamma;
    std::vector<double> d_beta;

    [[nodiscard]] std::vector<double> flatten() const;
};

enum class GradientMethod {
    ParameterShift,
    FiniteDifference,
    /// Reverse sweep over the statevector; exact, cost independent of |E|.
    Adjoint,
};

/// Accepts "parameter-shift", "finite-difference" and "adjoint".
/// @throws std::invalid_argument for any other tag.
GradientMethod parse_gradient_method(std::string_view tag);
std::string_view to_string(GradientMethod method);

/// Central-difference step used by GradientMethod::FiniteDifference.
inline constexpr double kFiniteDifferenceStep = 1e-5;

/// @throws ResourceLimitError unless 1 <= n <= kMaxNodes.
StateVector prepare_uniform_state(int n);

/// Multiplies amplitude b by exp(-i gamma cut_table[b]).
void apply_cost_layer(StateVector &state, std::span<const double> cut_table,
                      double gamma);

/// Applies RX-type rotation [[cos b, -i sin b], [-i sin b, cos b]] to every
/// qubit, i.e. exp(-i beta sum_q X_q).
void apply_mixer_layer(StateVector &state, double beta);

/// <psi| H_C |psi> for a diagonal H_C given by cut_table.
double expectation(const StateVector &state, std::span<const double> cut_table);

/// R = energy / c_max. @throws std::invalid_argument if c_max <= 0.
double approximation_ratio(double energy, double c_max);

/// Wraps gamma into [0, 2 pi) and beta into [0, pi) for reporting.
QaoaParams wrap_canonical(const QaoaParams &params);

/**
 * @brief Symmetry-reduced representative of a parameter point.
 *
 * The energy is invariant under (gamma, beta) -> (-gamma, -beta) (H_C, H_M
 * and |+> are real) and under beta_l -> beta_l + pi/2 for any single layer
 * (the inserted X^N commutes with H_C and fixes |+>). The representative
 * has gamma_1 in [0, pi], every gamma in [0, 2 pi) and every beta in
 * [0, pi/2).
 */
QaoaParams symmetry_reduce(const QaoaParams &params);

/**
 * @brief Max-Cut QAOA objective for one graph with its cut table cached.
 */
class QaoaObjective {
  public:
    /// @throws ResourceLimitError if the graph exceeds kMaxNodes.
    explicit QaoaObjective(Graph graph);

    [[nodiscard]] const Graph &graph() const { return graph_; }
    [[nodiscard]] int n_qubits() const { return graph_.n_nodes(); }
    [[nodiscard]] std::span<const double> cut_table() const { return cuts_; }

    [[nodiscard]] StateVector evolve(const QaoaParams &params) const;
    /// E_L(gamma, beta).
    [[nodiscard]] double energy(const QaoaParams &params) const;
    [[nodiscard]] EnergyGradient gradient(const QaoaParams &params,
                                          GradientMethod method) const;
    /// Energy and adjoint gradient from one forward and one reverse sweep.
    double energy_and_gradient(const QaoaParams &params,
                               EnergyGradient &grad) const;

  private:
    struct Shift;
    void apply_cost(StateVector &state, double gamma) const;
    [[nodiscard]] double shifted_energy(const QaoaParams &params,
                                        const Shift &shift) const;
    [[nodiscard]] EnergyGradient parameter_shift(const QaoaParams &p) const;
    [[nodiscard]] EnergyGradient finite_difference(const QaoaParams &p) const;

    Graph graph_;
    std::vector<double> cuts_;
    std::vector<std::uint32_t> levels_;
    std::uint32_t max_level_ = 0;
};

/// evolve() for a one-off graph.
StateVector evolve(const Graph &g, const QaoaParams &params);

/// Gradient of expectation(evolve(g, params)).
EnergyGradient gradient(const Graph &g, const QaoaParams &params,
                        GradientMethod method);

} // namespace qaoa
