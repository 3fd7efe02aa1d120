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
#include <filesystem>
#include <fstream>
#include <limits>

#include "qaoa/checkpoint.hpp"

using namespace qaoa;
using Kind = CheckpointError::Kind;

namespace {

Checkpoint sample() {
    Checkpoint c;
    c.kind = "gru";
    c.metadata = {{"hidden_dim", 2}, {"seed", 7}};
    Tensor a({2, 3});
    a.values = {1.0, -0.0, 1e-310, std::numeric_limits<double>::max(),
                0.1, -3.25};
    Tensor b({1});
    b.values = {std::nextafter(1.0, 2.0)};
    c.arrays = {{"W", a}, {"b", b}};
    return c;
}

Kind kind_of(const std::string &text) {
    try {
        (void)decode_checkpoint(text);
    } catch (const CheckpointError &e) {
        return e.kind();
    }
    FAIL("decode accepted a broken checkpoint");
    return Kind::Io;
}

} // namespace

TEST_CASE("round trip is bit exact", "[checkpoint]") {
    const Checkpoint c = sample();
    const Checkpoint back = decode_checkpoint(encode_checkpoint(c));
    CHECK(back.kind == c.kind);
    CHECK(back.metadata == c.metadata);
    REQUIRE(back.arrays.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.arrays[i].first == c.arrays[i].first);
        CHECK(back.arrays[i].second.shape == c.arrays[i].second.shape);
        const auto &x = back.arrays[i].second.values;
        const auto &y = c.arrays[i].second.values;
        REQUIRE(x.size() == y.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            CHECK(std::bit_cast<std::uint64_t>(x[k]) ==
                  std::bit_cast<std::uint64_t>(y[k]));
        }
    }
}

TEST_CASE("known base64 encoding of 1.0", "[checkpoint]") {
    // 1.0 little-endian is 00 00 00 00 00 00 f0 3f.
    Checkpoint c;
    c.kind = "cnn";
    Tensor t({1});
    t.values = {1.0};
    c.arrays = {{"x", t}};
    const auto doc = nlohmann::json::parse(encode_checkpoint(c));
    CHECK(doc["arrays"][0]["data"] == "AAAAAAAA8D8=");
    CHECK(doc["format"] == "qaoa-init-checkpoint");
    CHECK(doc["version"] == 1);
}

TEST_CASE("decode errors are classified", "[checkpoint]") {
    auto doc = nlohmann::json::parse(encode_checkpoint(sample()));

    CHECK(kind_of("{not json") == Kind::Corrupt);
    CHECK(kind_of("[]") == Kind::Corrupt);

    auto v = doc;
    v["version"] = 2;
    CHECK(kind_of(v.dump()) == Kind::Version);

    auto truncated = doc;
    truncated["arrays"][0]["data"] = "AAAA";
    CHECK(kind_of(truncated.dump()) == Kind::Corrupt);

    auto garbage = doc;
    garbage["arrays"][1]["data"] = "!!!!";
    CHECK(kind_of(garbage.dump()) == Kind::Corrupt);

    auto missing = doc;
    missing["arrays"][0].erase("shape");
    CHECK(kind_of(missing.dump()) == Kind::Corrupt);
}

TEST_CASE("require_array checks names and shapes", "[checkpoint]") {
    const Checkpoint c = sample();
    CHECK(require_array(c, "W", {2, 3}).values[5] == -3.25);
    try {
        (void)require_array(c, "W", {3, 2});
        FAIL("shape mismatch accepted");
    } catch (const CheckpointError &e) {
        CHECK(e.kind() == Kind::Shape);
        CHECK(std::string(e.what()).find("'W'") != std::string::npos);
    }
    CHECK_THROWS_AS(require_array(c, "nope", {1}), CheckpointError);
    CHECK_NOTHROW(require_kind(c, "gru"));
    CHECK_THROWS_AS(require_kind(c, "cnn"), CheckpointError);
}

TEST_CASE("file save and load", "[checkpoint]") {
    const auto dir = std::filesystem::temp_directory_path() / "qaoa_ckpt_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "w.json";
    save_checkpoint(sample(), path);
    CHECK(load_checkpoint(path).arrays[0].second == sample().arrays[0].second);
    try {
        (void)load_checkpoint(dir / "absent.json");
        FAIL("missing file accepted");
    } catch (const CheckpointError &e) {
        CHECK(e.kind() == Kind::Io);
    }
    {
        std::ofstream(path) << "{\"format\": \"qaoa-init-checkpoint\"";
    }
    CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
    std::filesystem::remove_all(dir);
}
