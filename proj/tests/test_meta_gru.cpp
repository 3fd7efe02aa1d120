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
#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qaoa/errors.hpp"
#include "qaoa/meta_gru.hpp"
#include "qaoa/optimizers.hpp"
#include "qaoa/rng.hpp"
#include "test_util.hpp"

using namespace qaoa;
using Catch::Approx;

namespace {

Graph single_edge() { return Graph(2, {{0, 1}}); }

double sig(double a) { return 1.0 / (1.0 + std::exp(-a)); }

GruWeights scalar_weights() {
    GruWeights w = GruWeights::zeros(1);
    w.W_z.values = {0.3, -0.2, 0.5};
    w.W_r.values = {-0.4, 0.1, 0.2};
    w.W_h.values = {0.7, 0.6, -0.9};
    w.R_z.values = {0.25};
    w.R_r.values = {-0.35};
    w.R_h.values = {0.45};
    w.b_z.values = {0.05};
    w.b_r.values = {-0.15};
    w.b_h.values = {0.2};
    w.d_z.values = {-0.1};
    w.d_r.values = {0.3};
    w.d_h.values = {-0.05};
    w.W_out.values = {0.8, -0.6};
    w.b_out.values = {0.01, 0.02};
    return w;
}

} // namespace

TEST_CASE("zero weights halve the hidden state", "[gru]") {
    const GruWeights w = GruWeights::zeros(3);
    const std::vector<double> x{0.4, 1.2, 0.7};
    const std::vector<double> h{0.5, -1.0, 0.25};
    const auto out = gru_cell_forward(w, x, h);
    CHECK(out == std::vector<double>{0.25, -0.5, 0.125});

    const auto step = gru_meta_step(w, std::vector<double>{0.4, 1.2}, 3.0,
                                    5.0, h);
    CHECK(step.theta == std::vector<double>{0.4, 1.2});
    CHECK(step.hidden == out);
}

TEST_CASE("bias-only readout shifts theta", "[gru]") {
    GruWeights w = GruWeights::random(4, 11);
    w.W_out.values.assign(w.W_out.size(), 0.0);
    w.b_out.values = {0.1, -0.1};
    const auto step = gru_meta_step(w, std::vector<double>{1.0, 2.0}, 0.3, 1.0,
                                    std::vector<double>(4, 0.0));
    CHECK(step.theta[0] == Approx(1.1).epsilon(1e-15));
    CHECK(step.theta[1] == Approx(1.9).epsilon(1e-15));
}

TEST_CASE("scalar cell matches hand arithmetic", "[gru]") {
    const GruWeights w = scalar_weights();
    const double theta[2] = {0.9, 0.4};
    const double energy = 0.6;
    const double scale = 2.0;
    const double x[3] = {theta[0], theta[1], energy / scale};

    for (double h0 : {0.0, -0.6, 0.8}) {
        const double z = sig(0.3 * x[0] - 0.2 * x[1] + 0.5 * x[2] +
                             0.25 * h0 + 0.05 - 0.1);
        const double r = sig(-0.4 * x[0] + 0.1 * x[1] + 0.2 * x[2] -
                             0.35 * h0 - 0.15 + 0.3);
        const double hc = std::tanh(0.7 * x[0] + 0.6 * x[1] - 0.9 * x[2] +
                                    r * (0.45 * h0 - 0.05) + 0.2);
        const double h1 = z * h0 + (1 - z) * hc;

        const auto step =
            gru_meta_step(w, theta, energy, scale, std::vector<double>{h0});
        CHECK(step.hidden[0] == Approx(h1).epsilon(1e-14));
        CHECK(step.theta[0] == Approx(theta[0] + 0.8 * h1 + 0.01).epsilon(1e-14));
        CHECK(step.theta[1] == Approx(theta[1] - 0.6 * h1 + 0.02).epsilon(1e-14));
    }
}

TEST_CASE("hidden state stays in [-1, 1]", "[gru]") {
    const GruWeights w = GruWeights::random(8, 3, 2.0);
    const QaoaObjective obj(generate_erdos_renyi(6, 0.6, 5));
    const auto ep = run_episode(w, obj, 9, {.horizon = 25});
    for (const auto &r : ep.records) {
        for (double h : r.hidden) {
            CHECK(std::abs(h) <= 1.0);
        }
    }
}

TEST_CASE("cell rejects bad shapes", "[gru]") {
    const GruWeights w = GruWeights::zeros(3);
    CHECK_THROWS_AS(gru_cell_forward(w, std::vector<double>(2),
                                     std::vector<double>(3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(gru_cell_forward(w, std::vector<double>(3),
                                     std::vector<double>(4)),
                    std::invalid_argument);
}

TEST_CASE("episode contracts", "[gru]") {
    const QaoaObjective obj(generate_erdos_renyi(5, 0.5, 1));

    SECTION("horizon one gives two records") {
        const auto ep = run_episode(GruWeights::random(4, 1), obj, 3,
                                    {.horizon = 1});
        CHECK(ep.records.size() == 2);
        CHECK(ep.horizon() == 1);
    }
    SECTION("zero weights are the identity optimizer") {
        const auto ep = run_episode(GruWeights::zeros(4), obj, 3);
        REQUIRE(ep.records.size() == 11);
        for (const auto &r : ep.records) {
            CHECK(r.theta == ep.records[0].theta);
            CHECK(r.energy == ep.records[0].energy);
        }
        CHECK(gru_loss(ep) == 0.0);
    }
    SECTION("theta0 follows the stochastic initialization") {
        const auto ep = run_episode(GruWeights::zeros(4), obj, 42);
        CHECK(ep.records[0].theta == random_params(1, 42).flatten());
    }
    SECTION("energies are bounded and best params are consistent") {
        const auto ep = run_episode(GruWeights::random(6, 2, 0.5), obj, 8);
        const double cmax = brute_force_max_cut(obj.graph()).c_max;
        for (const auto &r : ep.records) {
            CHECK(r.energy >= -1e-12);
            CHECK(r.energy <= cmax + 1e-12);
            CHECK(r.energy == Approx(obj.energy(QaoaParams::unflatten(r.theta))));
        }
        CHECK(obj.energy(ep.best_params()) ==
              ep.records[ep.best_index()].energy);
    }
    SECTION("horizon zero is rejected") {
        CHECK_THROWS_AS(run_episode(GruWeights::zeros(2), obj, 0,
                                    {.horizon = 0}),
                        std::invalid_argument);
    }
}

TEST_CASE("improvement loss arithmetic", "[gru]") {
    CHECK(gru_loss(std::vector<double>{1.0, 1.5, 1.2, 2.0}) == Approx(-1.0));
    CHECK(gru_loss(std::vector<double>{3.0, 3.0, 2.0, 1.0}) == 0.0);
    CHECK(gru_loss(std::vector<double>{0.0, 7.0}) == -7.0);
    CHECK_THROWS_AS(gru_loss(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(gru_loss(std::vector<double>{}), std::invalid_argument);

    // Loss telescopes to -(max E - E_0), independently of the path.
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> e(12);
        for (auto &v : e) {
            v = rng.uniform(0.0, 5.0);
        }
        const double best = *std::max_element(e.begin(), e.end());
        CHECK(gru_loss(e) == Approx(-(best - e[0])).margin(1e-12));
        CHECK(gru_loss(e) <= 0.0);
    }
}

namespace {

double episode_loss(const GruWeights &w, const QaoaObjective &obj,
                    std::span<const double> theta0, const EpisodeOptions &o) {
    return gru_loss(run_episode_from(w, obj, theta0, o));
}

/// Central differences of the episode loss over every weight.
std::vector<double> fd_gradient(const GruWeights &w, const QaoaObjective &obj,
                                std::span<const double> theta0,
                                const EpisodeOptions &o, double h) {
    auto flat = w.flat();
    std::vector<double> g(flat.size());
    GruWeights probe = w;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double keep = flat[i];
        flat[i] = keep + h;
        probe.assign_flat(flat);
        const double up = episode_loss(probe, obj, theta0, o);
        flat[i] = keep - h;
        probe.assign_flat(flat);
        const double down = episode_loss(probe, obj, theta0, o);
        flat[i] = keep;
        g[i] = (up - down) / (2 * h);
    }
    return g;
}

} // namespace

TEST_CASE("BPTT matches finite differences", "[gru]") {
    struct Case {
        Graph graph;
        std::size_t hidden;
        std::size_t horizon;
        std::uint64_t seed;
        std::vector<double> theta0;
        bool feed_initial;
    };
    const std::vector<Case> cases{
        {single_edge(), 2, 3, 21, {0.3, 0.2}, false},
        {single_edge(), 2, 3, 22, {2.0, 1.1}, false},
        {generate_erdos_renyi(5, 0.6, 3), 3, 4, 23, {0.7, 0.4}, false},
        {generate_erdos_renyi(4, 0.8, 4), 2, 3, 24, {0.5, 0.3}, true},
    };
    for (const auto &c : cases) {
        const QaoaObjective obj(c.graph);
        const EpisodeOptions o{.horizon = c.horizon,
                               .feed_initial_input = c.feed_initial};
        // First weight draw whose episode improves at least once, so the
        // gradient is not identically zero.
        std::uint64_t seed = c.seed;
        GruWeights w = GruWeights::random(c.hidden, seed, 0.5);
        while (episode_loss(w, obj, c.theta0, o) > -1e-3) {
            w = GruWeights::random(c.hidden, ++seed, 0.5);
        }
        const auto eg = episode_loss_and_gradient(w, obj, c.theta0, o);
        CHECK(eg.loss == episode_loss(w, obj, c.theta0, o));
        const auto fd = fd_gradient(w, obj, c.theta0, o, 1e-4);
        double scale = 0.0;
        for (double v : fd) {
            scale = std::max(scale, std::abs(v));
        }
        REQUIRE(scale > 1e-3);
        const double err =
            testing::max_relative_error(eg.grad, fd, 1e-3 * scale);
        INFO("seed " << seed << " worst relative error " << err);
        CHECK(err < 1e-3);
    }
}

TEST_CASE("training contracts", "[gru]") {
    const std::vector<Graph> graphs{single_edge()};
    const GruWeights w0 = GruWeights::random(4, 5);

    SECTION("zero epochs leave weights untouched") {
        const auto r = train_gru(w0, graphs, {.epochs = 0});
        CHECK(r.weights == w0);
        CHECK(r.loss_history.empty());
    }
    SECTION("fixed seeds reproduce the loss history") {
        const GruTrainOptions o{.epochs = 5, .meta_lr = 1e-2, .seed = 3};
        const std::vector<Graph> two{single_edge(),
                                     generate_erdos_renyi(4, 0.7, 2)};
        const auto a = train_gru(w0, two, o);
        const auto b = train_gru(w0, two, o);
        CHECK(a.loss_history == b.loss_history);
        CHECK(a.weights == b.weights);
    }
    SECTION("empty training set is rejected") {
        CHECK_THROWS_AS(train_gru(w0, std::vector<Graph>{}, {}),
                        std::invalid_argument);
    }
    SECTION("non-finite weights surface as a numeric error") {
        GruWeights bad = w0;
        bad.W_h.values[0] = std::nan("");
        CHECK_THROWS_AS(train_gru(bad, graphs, {.epochs = 1}), NumericError);
    }
}

namespace {

/// Mean shortfall 1 - best R over held-out starts on the single edge.
double single_edge_regret(const GruWeights &w) {
    const QaoaObjective obj(single_edge());
    double sum = 0.0;
    for (std::uint64_t s = 1000; s < 1100; ++s) {
        const auto ep = run_episode(w, obj, s);
        sum += 1.0 - ep.records[ep.best_index()].energy;
    }
    return sum / 100.0;
}

} // namespace

TEST_CASE("single-edge training improves the loss", "[gru][slow]") {
    const std::vector<Graph> graphs(10, single_edge());
    const GruWeights w0 = GruWeights::random(32, 17);
    const auto r = train_gru(w0, graphs,
                             {.epochs = 100, .meta_lr = 1e-2, .seed = 5});
    REQUIRE(r.loss_history.size() == 100);
    const double first = r.loss_history.front();
    const double last = r.loss_history.back();
    INFO("initial " << first << " final " << last);
    CHECK(last <= 0.5 * first);

    const double before = single_edge_regret(w0);
    const double after = single_edge_regret(r.weights);
    INFO("held-out regret before " << before << " after " << after);
    CHECK(after <= 0.5 * before);
}

TEST_CASE("long single-edge training nears the optimum", "[gru][slow]") {
    const std::vector<Graph> graphs{single_edge()};
    double ratio = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = train_gru(GruWeights::random(32, seed), graphs,
                                 {.epochs = 5000, .meta_lr = 1e-3, .seed = seed});
        ratio += 1.0 - single_edge_regret(r.weights);
    }
    INFO("mean best ratio " << ratio / 5);
    CHECK(ratio / 5 >= 0.95);
}
