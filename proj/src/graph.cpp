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
#include "qaoa/graph.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qaoa/errors.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {

namespace {

constexpr int kMaxResampleRetries = 64;

void require_oracle_size(const Graph &g) {
    if (g.n_nodes() > kMaxNodes) {
        throw ResourceLimitError("graph has " + std::to_string(g.n_nodes()) +
                                 " nodes; exact evaluation supports at most " +
                                 std::to_string(kMaxNodes));
    }
}

} // namespace

Graph::Graph(int n_nodes, std::vector<Edge> edges)
    : n_nodes_(n_nodes), edges_(std::move(edges)) {
    if (n_nodes_ < 1) {
        throw std::invalid_argument("graph needs at least one node");
    }
    for (auto &e : edges_) {
        if (e.u == e.v) {
            throw std::invalid_argument("self-loop on vertex " +
                                        std::to_string(e.u));
        }
        if (e.u > e.v) {
            std::swap(e.u, e.v);
        }
        if (e.u < 0 || e.v >= n_nodes_) {
            throw std::invalid_argument("edge endpoint out of range");
        }
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw std::invalid_argument("duplicate edge");
    }
}

Graph generate_erdos_renyi(int n, double p, std::uint64_t seed) {
    if (n < 2 || n > kMaxNodes) {
        throw std::invalid_argument("node count " + std::to_string(n) +
                                    " outside [2, " +
                                    std::to_string(kMaxNodes) + "]");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("edge probability outside [0, 1]");
    }
    for (int attempt = 0; attempt <= kMaxResampleRetries; ++attempt) {
        Rng rng(seed + static_cast<std::uint64_t>(attempt));
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (rng.uniform() < p) {
                    edges.push_back({i, j});
                }
            }
        }
        if (!edges.empty()) {
            return Graph(n, std::move(edges));
        }
    }
    throw UnsatisfiableInstanceError(
        "no edges sampled after " + std::to_string(kMaxResampleRetries) +
        " retries (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");
}

double cut_value(const Graph &g, std::span<const int> z) {
    if (z.size() != static_cast<std::size_t>(g.n_nodes())) {
        throw std::invalid_argument("assignment length does not match graph");
    }
    double total = 0.0;
    for (const auto &e : g.edges()) {
        total += 0.5 * Graph::weight * (1.0 - z[e.u] * z[e.v]);
    }
    return total;
}

CutAssignment assignment_from_index(std::uint64_t index, int n_nodes) {
    CutAssignment z(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
        z[i] = ((index >> i) & 1U) != 0U ? -1 : +1;
    }
    return z;
}

MaxCutResult brute_force_max_cut(const Graph &g) {
    require_oracle_size(g);
    const int n = g.n_nodes();
    std::vector<std::vector<int>> adj(n);
    for (const auto &e : g.edges()) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }

    // Gray-code walk over vertices 1..n-1; vertex 0 stays on side 0.
    std::uint64_t bits = 0;
    long cut = 0;
    long best = 0;
    std::vector<std::uint64_t> witnesses{0};
    const std::uint64_t count = std::uint64_t{1} << (n - 1);
    for (std::uint64_t k = 1; k < count; ++k) {
        const int v = std::countr_zero(k) + 1;
        const bool side = ((bits >> v) & 1U) != 0U;
        long same = 0;
        for (int w : adj[v]) {
            same += (((bits >> w) & 1U) != 0U) == side ? 1 : 0;
        }
        const long deg = static_cast<long>(adj[v].size());
        cut += same - (deg - same);
        bits ^= std::uint64_t{1} << v;
        if (cut > best) {
            best = cut;
            witnesses.assign(1, bits);
        } else if (cut == best) {
            witnesses.push_back(bits);
        }
    }

    std::sort(witnesses.begin(), witnesses.end());
    MaxCutResult result;
    result.c_max = static_cast<double>(best);
    result.witnesses.reserve(witnesses.size());
    for (auto b : witnesses) {
        result.witnesses.push_back(assignment_from_index(b, n));
    }
    return result;
}

std::vector<double> basis_cut_table(const Graph &g) {
    require_oracle_size(g);
    const int n = g.n_nodes();
    // Adding the top set bit h to a state whose higher bits are all zero cuts
    // every edge of h except those to lower vertices already on side 1.
    std::vector<std::uint64_t> lower(n, 0);
    std::vector<int> degree(n, 0);
    for (const auto &e : g.edges()) {
        lower[e.v] |= std::uint64_t{1} << e.u;
        ++degree[e.u];
        ++degree[e.v];
    }
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<double> table(dim, 0.0);
    for (std::uint64_t b = 1; b < dim; ++b) {
        const int h = std::bit_width(b) - 1;
        const std::uint64_t rest = b ^ (std::uint64_t{1} << h);
        const int lower_on_one = std::popcount(rest & lower[h]);
        table[b] = table[rest] + degree[h] - 2 * lower_on_one;
    }
    return table;
}

void write_graph(std::ostream &os, const Graph &g) {
    os << g.n_nodes() << ' ' << g.n_edges() << '\n';
    for (const auto &e : g.edges()) {
        os << e.u << ' ' << e.v << '\n';
    }
}

Graph read_graph(std::istream &is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw std::invalid_argument("graph file: missing header");
    }
    std::istringstream header(line);
    long n = 0;
    long m = 0;
    if (!(header >> n >> m) || n < 1 || m < 0) {
        throw std::invalid_argument("graph file: malformed header '" + line +
                                    "'");
    }
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long k = 0; k < m; ++k) {
        if (!std::getline(is, line)) {
            throw std::invalid_argument("graph file: expected " +
                                        std::to_string(m) + " edges, got " +
                                        std::to_string(k));
        }
        std::istringstream row(line);
        int u = 0;
        int v = 0;
        if (!(row >> u >> v)) {
            throw std::invalid_argument("graph file: malformed edge '" + line +
                                        "'");
        }
        edges.push_back({u, v});
    }
    return Graph(static_cast<int>(n), std::move(edges));
}

} // namespace qaoa
