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
#include "qaoa/optimizers.hpp"

using namespace qaoa;
using std::numbers::pi;

TEST_CASE("optimizer_step first steps", "[optimizers]") {
    SECTION("adagrad") {
        OptimizerState st(OptimizerKind::Adagrad, 1);
        std::vector<double> x{0.0};
        optimizer_step(st, x, std::vector{1.0});
        REQUIRE(std::abs(x[0] - 0.1 / (1.0 + 1e-10)) < 1e-12);
        REQUIRE(st.step_count == 1);
    }
    SECTION("adam moves lr * sign(g)") {
        for (double g : {1e-3, 0.5, 7.0}) {
            OptimizerState st(OptimizerKind::Adam, 1);
            std::vector<double> x{0.0};
            optimizer_step(st, x, std::vector{g});
            REQUIRE(std::abs(x[0] - 0.1) < 1e-6);
        }
    }
    SECTION("zero gradient leaves parameters alone") {
        for (auto kind : {OptimizerKind::Adam, OptimizerKind::RmsProp,
                          OptimizerKind::Adagrad}) {
            OptimizerState st(kind, 3);
            std::vector<double> x{0.3, -1.0, 2.0};
            const auto before = x;
            optimizer_step(st, x, std::vector{0.0, 0.0, 0.0});
            REQUIRE(x == before);
            REQUIRE(st.step_count == 1);
        }
    }
    SECTION("errors") {
        OptimizerState st(OptimizerKind::Adam, 2);
        std::vector<double> x{0.0, 0.0};
        REQUIRE_THROWS_AS(optimizer_step(st, x, std::vector{1.0}),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(optimizer_step(st, x, std::vector<double>{1.0, std::nan("")}),
                          NumericError);
        REQUIRE_THROWS_AS(OptimizerState(OptimizerKind::Adam, 1, {.learning_rate = 0.0}),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(parse_optimizer_kind("sgd"), std::invalid_argument);
    }
}

TEST_CASE("each method maximizes -x^2 from x = 1", "[optimizers][property]") {
    for (auto kind :
         {OptimizerKind::Adam, OptimizerKind::RmsProp, OptimizerKind::Adagrad}) {
        CAPTURE(to_string(kind));
        OptimizerState st(kind, 1);
        std::vector<double> x{1.0};
        for (int t = 0; t < 200; ++t) {
            optimizer_step(st, x, std::vector{-2.0 * x[0]});
        }
        REQUIRE(std::abs(x[0]) < 1e-2);
    }
}

TEST_CASE("maximize", "[optimizers]") {
    const QaoaObjective edge(Graph(2, {{0, 1}}));
    SECTION("single edge converges to the analytic optimum") {
        const auto trace = maximize(edge, QaoaParams({1.4}, {0.35}), {});
        REQUIRE(std::abs(trace.best().energy - 1.0) < 1e-3);
        REQUIRE(trace.entries.size() <= 201);
    }
    SECTION("budget 1 records init plus one step") {
        const auto trace = maximize(edge, QaoaParams({1.0}, {0.2}),
                                    {.budget = 1, .tol = 0.0});
        REQUIRE(trace.entries.size() == 2);
        REQUIRE(trace.iterations == 1);
    }
    SECTION("stationary start keeps the optimum") {
        const auto trace =
            maximize(edge, QaoaParams({pi / 2}, {pi / 8}), {.tol = 0.0});
        for (double e : trace.best_so_far()) {
            REQUIRE(std::abs(e - 1.0) < 1e-12);
        }
    }
    SECTION("deterministic, best-so-far non-decreasing, energies bounded") {
        const Graph g = generate_erdos_renyi(7, 0.6, 21);
        const QaoaObjective obj(g);
        const double c_max = brute_force_max_cut(g).c_max;
        for (auto kind : {OptimizerKind::Adam, OptimizerKind::RmsProp,
                          OptimizerKind::Adagrad}) {
            const MaximizeOptions opt{.method = kind, .budget = 50};
            const auto init = random_params(2, 5);
            const auto a = maximize(obj, init, opt);
            const auto b = maximize(obj, init, opt);
            REQUIRE(a.entries.size() == b.entries.size());
            for (std::size_t i = 0; i < a.entries.size(); ++i) {
                REQUIRE(a.entries[i].params == b.entries[i].params);
                REQUIRE(a.entries[i].energy == b.entries[i].energy);
                REQUIRE(a.entries[i].energy >= 0.0);
                REQUIRE(a.entries[i].energy <= c_max + 1e-12);
            }
            const auto bsf = a.best_so_far();
            REQUIRE(std::is_sorted(bsf.begin(), bsf.end()));
            REQUIRE(bsf.back() == a.best().energy);
        }
    }
    SECTION("budget must be positive") {
        REQUIRE_THROWS_AS(maximize(edge, QaoaParams({1.0}, {0.2}), {.budget = 0}),
                          std::invalid_argument);
    }
}

TEST_CASE("random_params lies in the canonical box", "[optimizers]") {
    const auto p = random_params(6, 1234);
    REQUIRE(p.depth() == 6);
    for (std::size_t l = 0; l < 6; ++l) {
        REQUIRE(p.gammas[l] >= 0.0);
        REQUIRE(p.gammas[l] < 2 * pi);
        REQUIRE(p.betas[l] >= 0.0);
        REQUIRE(p.betas[l] < pi);
    }
    REQUIRE(random_params(6, 1234) == p);
}
