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
#include <algorithm>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "qaoa/errors.hpp"
#include "qaoa/graph.hpp"
#include "qaoa/rng.hpp"

using namespace qaoa;

namespace {

Graph complete_graph(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            edges.push_back({i, j});
        }
    }
    return {n, edges};
}

Graph path3() { return {3, {{0, 1}, {1, 2}}}; }

} // namespace

TEST_CASE("Graph normalizes and validates edges", "[graph]") {
    Graph g(4, {{3, 1}, {0, 2}});
    REQUIRE(g.edges()[0] == Edge{0, 2});
    REQUIRE(g.edges()[1] == Edge{1, 3});
    REQUIRE_THROWS_AS(Graph(3, {{1, 1}}), std::invalid_argument);
    REQUIRE_THROWS_AS(Graph(3, {{0, 3}}), std::invalid_argument);
    REQUIRE_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("generate_erdos_renyi", "[graph]") {
    SECTION("p = 1 yields the complete graph") {
        for (std::uint64_t seed : {0ULL, 17ULL, 123456789ULL}) {
            REQUIRE(generate_erdos_renyi(4, 1.0, seed) == complete_graph(4));
        }
    }
    SECTION("p = 0 exhausts the retries") {
        REQUIRE_THROWS_AS(generate_erdos_renyi(5, 0.0, 7),
                          UnsatisfiableInstanceError);
    }
    SECTION("deterministic in (n, p, seed)") {
        const Graph a = generate_erdos_renyi(8, 0.5, 42);
        const Graph b = generate_erdos_renyi(8, 0.5, 42);
        REQUIRE(a == b);
        REQUIRE(a != generate_erdos_renyi(8, 0.5, 43));
    }
    SECTION("node count out of range") {
        REQUIRE_THROWS_AS(generate_erdos_renyi(1, 0.5, 1),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(generate_erdos_renyi(kMaxNodes + 1, 0.5, 1),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(generate_erdos_renyi(5, 1.5, 1),
                          std::invalid_argument);
    }
    SECTION("empty samples are redrawn with seed + 1") {
        // n = 2 has a single candidate edge; find a seed whose first draw
        // misses it and check the result equals the seed + 1 sample.
        const double p = 0.5;
        for (std::uint64_t seed = 0; seed < 64; ++seed) {
            Rng rng(seed);
            if (rng.uniform() >= p) {
                REQUIRE(generate_erdos_renyi(2, p, seed).n_edges() == 1);
                return;
            }
        }
        FAIL("no seed with an empty first draw");
    }
    SECTION("edge frequency tracks p") {
        std::size_t total = 0;
        const int trials = 400;
        for (int s = 0; s < trials; ++s) {
            total += generate_erdos_renyi(10, 0.3, 1000 + s).n_edges();
        }
        const double freq = static_cast<double>(total) / (trials * 45.0);
        REQUIRE(freq == Catch::Approx(0.3).margin(0.02));
    }
}

TEST_CASE("cut_value examples", "[graph]") {
    REQUIRE(cut_value(path3(), std::vector{+1, -1, +1}) == 2.0);
    REQUIRE(cut_value(complete_graph(4), std::vector{1, 1, 1, 1}) == 0.0);
    REQUIRE(cut_value(complete_graph(3), std::vector{1, 1, -1}) == 2.0);
    REQUIRE_THROWS_AS(cut_value(path3(), std::vector{1, 1}),
                      std::invalid_argument);
}

TEST_CASE("brute_force_max_cut examples", "[graph]") {
    REQUIRE(brute_force_max_cut(complete_graph(4)).c_max == 4.0);
    REQUIRE(brute_force_max_cut(complete_graph(5)).c_max == 6.0);
    const auto path = brute_force_max_cut(path3());
    REQUIRE(path.c_max == 2.0);
    REQUIRE(path.witnesses == std::vector<CutAssignment>{{+1, -1, +1}});
    for (int n = 4; n <= 8; ++n) {
        REQUIRE(brute_force_max_cut(complete_graph(n)).c_max ==
                static_cast<double>(n * n / 4));
    }
}

TEST_CASE("basis_cut_table examples", "[graph]") {
    REQUIRE(basis_cut_table(Graph(2, {{0, 1}})) ==
            std::vector<double>{0, 1, 1, 0});
    REQUIRE(basis_cut_table(complete_graph(3)) ==
            std::vector<double>{0, 2, 2, 2, 2, 2, 2, 0});
    REQUIRE(basis_cut_table(Graph(3, {})) == std::vector<double>(8, 0.0));
}

TEST_CASE("cut table, brute force and cut_value agree", "[graph][property]") {
    Rng pick(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(pick.below(9));
        const double p = pick.uniform(0.2, 1.0);
        const Graph g = generate_erdos_renyi(n, p, pick.next());
        const auto table = basis_cut_table(g);
        const auto result = brute_force_max_cut(g);

        double table_max = 0.0;
        for (std::uint64_t b = 0; b < table.size(); ++b) {
            const auto z = assignment_from_index(b, n);
            REQUIRE(table[b] == cut_value(g, z));
            std::vector<int> flipped(z);
            for (auto &x : flipped) {
                x = -x;
            }
            REQUIRE(cut_value(g, flipped) == table[b]);
            REQUIRE(table[b] >= 0.0);
            REQUIRE(table[b] <= static_cast<double>(g.n_edges()));
            table_max = std::max(table_max, table[b]);
        }
        REQUIRE(result.c_max == table_max);
        REQUIRE_FALSE(result.witnesses.empty());
        for (const auto &w : result.witnesses) {
            REQUIRE(w[0] == +1);
            REQUIRE(cut_value(g, w) == result.c_max);
        }
        const auto optimal_even = std::count_if(
            table.begin(), table.end(),
            [&](double c) { return c == result.c_max; });
        REQUIRE(static_cast<std::size_t>(optimal_even) ==
                2 * result.witnesses.size());
    }
}

TEST_CASE("oracles reject oversized graphs", "[graph]") {
    REQUIRE_THROWS_AS(brute_force_max_cut(Graph(kMaxNodes + 1, {{0, 1}})),
                      ResourceLimitError);
    REQUIRE_THROWS_AS(basis_cut_table(Graph(kMaxNodes + 1, {{0, 1}})),
                      ResourceLimitError);
}

TEST_CASE("graph text format", "[graph]") {
    const Graph g = generate_erdos_renyi(9, 0.4, 5);
    std::stringstream ss;
    write_graph(ss, g);
    REQUIRE(read_graph(ss) == g);

    std::ostringstream out;
    write_graph(out, Graph(3, {{1, 2}, {0, 1}}));
    REQUIRE(out.str() == "3 2\n0 1\n1 2\n");

    std::istringstream truncated("4 3\n0 1\n");
    REQUIRE_THROWS_AS(read_graph(truncated), std::invalid_argument);
    std::istringstream garbage("four edges\n");
    REQUIRE_THROWS_AS(read_graph(garbage), std::invalid_argument);
}
