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

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace qaoa {

/// Largest instance the exact oracles and the statevector engine accept.
inline constexpr int kMaxNodes = 24;

struct Edge {
    int u;
    int v;
    auto operator<=>(const Edge &) const = default;
};

/**
 * @brief Undirected Max-Cut instance with unit edge weights.
 *
 * Edges are stored normalized (u < v), sorted lexicographically, without
 * duplicates. Vertex i maps to qubit i, which is bit i of a basis-state index.
 */
class Graph {
  public:
    /// @throws std::invalid_argument on self-loops, out-of-range endpoints,
    /// duplicate edges, or a non-positive node count.
    Graph(int n_nodes, std::vector<Edge> edges);

    [[nodiscard]] int n_nodes() const { return n_nodes_; }
    [[nodiscard]] std::span<const Edge> edges() const { return edges_; }
    [[nodiscard]] std::size_t n_edges() const { return edges_.size(); }

    /// Edge weight; every edge carries 1.
    static constexpr double weight = 1.0;

    bool operator==(const Graph &) const = default;

  private:
    int n_nodes_;
    std::vector<Edge> edges_;
};

/// Labels z_i in {+1, -1}. Bit b of a basis index corresponds to z = 1 - 2b.
using CutAssignment = std::vector<int>;

struct MaxCutResult {
    double c_max = 0.0;
    /// Optimal assignments with z_0 = +1 (the global flip is implied).
    std::vector<CutAssignment> witnesses;
};

/**
 * @brief Samples G(n, p). Candidate edges (i, j), i < j, are visited in
 * lexicographic order and each consumes one uniform draw from Rng(seed).
 * An empty sample is redrawn with seed + 1, up to 64 retries.
 *
 * @throws std::invalid_argument if n is outside [2, kMaxNodes] or p outside
 * [0, 1].
 * @throws UnsatisfiableInstanceError if every retry is edgeless.
 */
Graph generate_erdos_renyi(int n, double p, std::uint64_t seed);

/// Number of edges crossing the partition, (1/2) sum (1 - z_i z_j).
double cut_value(const Graph &g, std::span<const int> z);

/// Exhaustive search over the 2^(N-1) partitions with z_0 = +1.
MaxCutResult brute_force_max_cut(const Graph &g);

/// Cut value of every computational basis state, indexed by bit string.
std::vector<double> basis_cut_table(const Graph &g);

CutAssignment assignment_from_index(std::uint64_t index, int n_nodes);

/// "n m" header followed by m lines "i j".
void write_graph(std::ostream &os, const Graph &g);
Graph read_graph(std::istream &is);

} // namespace qaoa
