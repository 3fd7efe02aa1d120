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
#include <cmath>
#include <numbers>

#include <catch_amalgamated.hpp>

#include "qaoa/errors.hpp"
#include "qaoa/graph.hpp"
#include "qaoa/rng.hpp"
#include "qaoa/simulator.hpp"
#include "test_util.hpp"

using namespace qaoa;
using qaoa::testing::DenseQaoaOracle;
using qaoa::testing::max_relative_error;
using std::numbers::pi;

namespace {

const Graph kEdge(2, {{0, 1}});

double single_edge_energy(double g, double b) {
    return 0.5 * (1.0 + std::sin(g) * std::sin(4.0 * b));
}

QaoaParams random_point(Rng &rng, std::size_t depth) {
    QaoaParams p;
    for (std::size_t l = 0; l < depth; ++l) {
        p.gammas.push_back(rng.uniform(-pi, 2.0 * pi));
        p.betas.push_back(rng.uniform(-pi, pi));
    }
    return p;
}

Graph random_graph(Rng &rng, int n_min, int n_max) {
    const int n = n_min + static_cast<int>(rng.below(n_max - n_min + 1));
    return generate_erdos_renyi(n, rng.uniform(0.3, 1.0), rng.next());
}

} // namespace

TEST_CASE("prepare_uniform_state", "[simulator]") {
    const auto s1 = prepare_uniform_state(1);
    REQUIRE(s1[0] == Amplitude(1.0 / std::sqrt(2.0), 0.0));
    REQUIRE(s1[1] == s1[0]);
    const auto s2 = prepare_uniform_state(2);
    for (std::size_t i = 0; i < 4; ++i) {
        REQUIRE(s2[i] == Amplitude(0.5, 0.0));
    }
    for (int n = 1; n <= 16; ++n) {
        REQUIRE(std::abs(prepare_uniform_state(n).squared_norm() - 1.0) <
                1e-15);
    }
    REQUIRE_THROWS_AS(prepare_uniform_state(0), ResourceLimitError);
    REQUIRE_THROWS_AS(prepare_uniform_state(kMaxNodes + 1), ResourceLimitError);
}

TEST_CASE("apply_cost_layer", "[simulator]") {
    const auto table = basis_cut_table(kEdge);
    SECTION("gamma = 0 is the identity bit for bit") {
        Rng rng(3);
        std::vector<Amplitude> amps(4);
        for (auto &a : amps) {
            a = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        }
        StateVector s(2, amps);
        apply_cost_layer(s, table, 0.0);
        for (std::size_t i = 0; i < 4; ++i) {
            REQUIRE(s[i] == amps[i]);
        }
    }
    SECTION("gamma = 2 pi is the identity for integer spectra") {
        const Graph g = generate_erdos_renyi(6, 0.6, 11);
        auto s = evolve(g, QaoaParams({0.3}, {0.2}));
        const auto before = s;
        apply_cost_layer(s, basis_cut_table(g), 2.0 * pi);
        for (std::size_t i = 0; i < s.dim(); ++i) {
            REQUIRE(std::abs(s[i] - before[i]) < 1e-12);
        }
    }
    SECTION("single edge at gamma = pi/2") {
        auto s = prepare_uniform_state(2);
        apply_cost_layer(s, table, pi / 2.0);
        const Amplitude expected[] = {{0.5, 0}, {0, -0.5}, {0, -0.5}, {0.5, 0}};
        for (std::size_t i = 0; i < 4; ++i) {
            REQUIRE(std::abs(s[i] - expected[i]) < 1e-15);
        }
    }
    SECTION("length mismatch") {
        auto s = prepare_uniform_state(3);
        REQUIRE_THROWS_AS(apply_cost_layer(s, table, 0.1),
                          std::invalid_argument);
    }
}

TEST_CASE("apply_mixer_layer", "[simulator]") {
    SECTION("beta = 0 is the identity bit for bit") {
        Rng rng(5);
        std::vector<Amplitude> amps(8);
        for (auto &a : amps) {
            a = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        }
        StateVector s(3, amps);
        apply_mixer_layer(s, 0.0);
        for (std::size_t i = 0; i < 8; ++i) {
            REQUIRE(s[i] == amps[i]);
        }
    }
    SECTION("beta = pi/2 maps |0..0> to (-i)^n |1..1>") {
        for (int n = 1; n <= 5; ++n) {
            StateVector s(n);
            apply_mixer_layer(s, pi / 2.0);
            const Amplitude phase = std::pow(Amplitude(0, -1), n);
            for (std::size_t i = 0; i < s.dim(); ++i) {
                const Amplitude want = i + 1 == s.dim() ? phase : Amplitude{};
                REQUIRE(std::abs(s[i] - want) < 1e-15);
            }
        }
    }
    SECTION("uniform state picks up only the phase exp(-i beta n)") {
        const int n = 4;
        for (double beta : {0.1, 0.7, 2.3}) {
            auto s = prepare_uniform_state(n);
            apply_mixer_layer(s, beta);
            const Amplitude want =
                std::polar(1.0, -beta * n) * prepare_uniform_state(n)[0];
            for (std::size_t i = 0; i < s.dim(); ++i) {
                REQUIRE(std::abs(s[i] - want) < 1e-14);
            }
        }
    }
}

TEST_CASE("evolve", "[simulator]") {
    const Graph g = generate_erdos_renyi(5, 0.7, 9);
    const auto uniform = prepare_uniform_state(5);
    SECTION("depth 0 and zero angles return the uniform state") {
        auto s0 = evolve(g, QaoaParams{});
        auto s3 = evolve(g, QaoaParams({0, 0, 0}, {0, 0, 0}));
        for (std::size_t i = 0; i < uniform.dim(); ++i) {
            REQUIRE(s0[i] == uniform[i]);
            REQUIRE(std::abs(s3[i] - uniform[i]) < 1e-15);
        }
    }
    SECTION("single edge optimum") {
        const auto s = evolve(kEdge, QaoaParams({pi / 2}, {pi / 8}));
        REQUIRE(std::abs(expectation(s, basis_cut_table(kEdge)) - 1.0) < 1e-12);
    }
    SECTION("matches the dense-matrix oracle") {
        Rng rng(77);
        for (int trial = 0; trial < 20; ++trial) {
            const Graph h = random_graph(rng, 2, 6);
            const auto p = random_point(rng, 1 + rng.below(3));
            const auto s = evolve(h, p);
            const auto ref = DenseQaoaOracle(h).state(p);
            for (std::size_t i = 0; i < s.dim(); ++i) {
                REQUIRE(std::abs(s[i] - ref[i]) < 1e-12);
            }
        }
    }
    SECTION("mismatched angle sequences") {
        QaoaParams bad;
        bad.gammas = {0.1, 0.2};
        bad.betas = {0.1};
        REQUIRE_THROWS_AS(evolve(g, bad), std::invalid_argument);
        REQUIRE_THROWS_AS(QaoaParams({0.1, 0.2}, {0.1}), std::invalid_argument);
    }
}

TEST_CASE("expectation", "[simulator]") {
    SECTION("single-edge landscape on a 5x5 grid") {
        const auto table = basis_cut_table(kEdge);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                const double g = pi * i / 4.0;
                const double b = pi * j / 4.0;
                const double e =
                    expectation(evolve(kEdge, QaoaParams({g}, {b})), table);
                REQUIRE(std::abs(e - single_edge_energy(g, b)) < 1e-12);
            }
        }
    }
    SECTION("uniform state gives |E|/2") {
        Rng rng(8);
        for (int trial = 0; trial < 20; ++trial) {
            const Graph g = random_graph(rng, 2, 10);
            const double e = expectation(prepare_uniform_state(g.n_nodes()),
                                         basis_cut_table(g));
            REQUIRE(std::abs(e - 0.5 * double(g.n_edges())) < 1e-12);
        }
    }
    SECTION("basis state |01> of the single edge") {
        StateVector s(2, {0, 1, 0, 0});
        REQUIRE(expectation(s, basis_cut_table(kEdge)) == 1.0);
    }
    SECTION("dimension mismatch") {
        REQUIRE_THROWS_AS(expectation(prepare_uniform_state(3),
                                      basis_cut_table(kEdge)),
                          std::invalid_argument);
    }
}

TEST_CASE("gradient examples", "[simulator][gradient]") {
    const GradientMethod methods[] = {GradientMethod::ParameterShift,
                                      GradientMethod::FiniteDifference,
                                      GradientMethod::Adjoint};
    for (auto m : methods) {
        CAPTURE(to_string(m));
        const auto at_opt = gradient(kEdge, QaoaParams({pi / 2}, {pi / 8}), m);
        REQUIRE(std::abs(at_opt.d_gamma[0]) < 1e-8);
        REQUIRE(std::abs(at_opt.d_beta[0]) < 1e-8);
        const auto at_zero = gradient(kEdge, QaoaParams({0.0}, {pi / 8}), m);
        REQUIRE(std::abs(at_zero.d_gamma[0] - 0.5) < 1e-8);
        REQUIRE(std::abs(at_zero.d_beta[0]) < 1e-8);
    }
    REQUIRE(parse_gradient_method("parameter-shift") ==
            GradientMethod::ParameterShift);
    REQUIRE_THROWS_AS(parse_gradient_method("backprop"), std::invalid_argument);
    REQUIRE_THROWS_AS(gradient(kEdge, QaoaParams{}, GradientMethod::Adjoint),
                      std::invalid_argument);
}

TEST_CASE("gradient routes agree", "[simulator][gradient][property]") {
    Rng rng(2718);
    double worst_shift = 0.0;
    double worst_adjoint = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Graph g = random_graph(rng, 2, 8);
        const auto p = random_point(rng, 1 + rng.below(4));
        const QaoaObjective obj(g);
        const auto fd =
            obj.gradient(p, GradientMethod::FiniteDifference).flatten();
        const auto ps = obj.gradient(p, GradientMethod::ParameterShift).flatten();
        const auto adj = obj.gradient(p, GradientMethod::Adjoint).flatten();
        worst_shift = std::max(worst_shift, max_relative_error(ps, fd));
        worst_adjoint = std::max(worst_adjoint, max_relative_error(adj, ps));
    }
    INFO("parameter-shift vs finite-difference " << worst_shift);
    INFO("adjoint vs parameter-shift " << worst_adjoint);
    REQUIRE(worst_shift < 1e-6);
    REQUIRE(worst_adjoint < 1e-10);
}

TEST_CASE("simulator invariants", "[simulator][property]") {
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph g = random_graph(rng, 2, 9);
        const QaoaObjective obj(g);
        const auto p = random_point(rng, 1 + rng.below(5));
        const auto s = obj.evolve(p);
        REQUIRE(std::abs(s.squared_norm() - 1.0) < 1e-12);

        const double e = expectation(s, obj.cut_table());
        const double c_max = brute_force_max_cut(g).c_max;
        REQUIRE(e >= 0.0);
        REQUIRE(e <= c_max + 1e-12);

        // Global phase leaves the expectation unchanged.
        auto rotated = s;
        const Amplitude phase = std::polar(1.0, rng.uniform(0, 2 * pi));
        for (auto &a : rotated.amplitudes()) {
            a *= phase;
        }
        REQUIRE(std::abs(expectation(rotated, obj.cut_table()) - e) < 1e-12);

        // Zero angles at any depth give |E|/2.
        const std::size_t depth = p.depth();
        const QaoaParams zeros(std::vector<double>(depth, 0.0),
                               std::vector<double>(depth, 0.0));
        REQUIRE(std::abs(obj.energy(zeros) - 0.5 * double(g.n_edges())) <
                1e-12);

        // Symmetries used by symmetry_reduce.
        QaoaParams mirrored = p;
        for (auto &x : mirrored.gammas) {
            x = -x;
        }
        for (auto &x : mirrored.betas) {
            x = -x;
        }
        REQUIRE(std::abs(obj.energy(mirrored) - e) < 1e-12);
        QaoaParams shifted = p;
        shifted.betas[rng.below(depth)] += pi / 2.0;
        shifted.gammas[rng.below(depth)] += 2.0 * pi;
        REQUIRE(std::abs(obj.energy(shifted) - e) < 1e-11);

        const auto reduced = symmetry_reduce(p);
        REQUIRE(std::abs(obj.energy(reduced) - e) < 1e-11);
        REQUIRE(reduced.gammas[0] <= pi);
        for (std::size_t l = 0; l < depth; ++l) {
            REQUIRE(reduced.gammas[l] >= 0.0);
            REQUIRE(reduced.gammas[l] < 2.0 * pi);
            REQUIRE(reduced.betas[l] >= 0.0);
            REQUIRE(reduced.betas[l] < pi / 2.0);
        }
        const auto wrapped = wrap_canonical(p);
        REQUIRE(std::abs(obj.energy(wrapped) - e) < 1e-11);
        for (std::size_t l = 0; l < depth; ++l) {
            REQUIRE(wrapped.betas[l] >= 0.0);
            REQUIRE(wrapped.betas[l] < pi);
        }
    }
}

TEST_CASE("approximation_ratio", "[simulator]") {
    REQUIRE(approximation_ratio(1.9, 2.0) == Catch::Approx(0.95));
    REQUIRE(approximation_ratio(3.0, 4.0) == 0.75);
    const QaoaObjective edge(kEdge);
    REQUIRE(approximation_ratio(edge.energy(QaoaParams({pi / 2}, {pi / 8})),
                                1.0) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE_THROWS_AS(approximation_ratio(1.0, 0.0), std::invalid_argument);
}
