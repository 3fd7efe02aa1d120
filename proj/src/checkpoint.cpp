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
#include "qaoa/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <sodium.h>

namespace qaoa {

namespace {

constexpr std::string_view kDtype = "float64-le";

std::string encode_values(const std::vector<double> &values) {
    std::vector<unsigned char> bytes(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint64_t>(values[i]);
        for (std::size_t k = 0; k < 8; ++k) {
            bytes[i * 8 + k] = static_cast<unsigned char>(bits >> (8 * k));
        }
    }
    const std::size_t len =
        sodium_base64_ENCODED_LEN(bytes.size(), sodium_base64_VARIANT_ORIGINAL);
    std::string out(len, '\0');
    sodium_bin2base64(out.data(), len, bytes.data(), bytes.size(),
                      sodium_base64_VARIANT_ORIGINAL);
    out.resize(len - 1); // drop the terminator
    return out;
}

std::vector<double> decode_values(const std::string &b64, std::size_t count,
                                  const std::string &name) {
    std::vector<unsigned char> bytes(count * 8 + 3);
    std::size_t written = 0;
    if (sodium_base642bin(bytes.data(), bytes.size(), b64.data(), b64.size(),
                          nullptr, &written, nullptr,
                          sodium_base64_VARIANT_ORIGINAL) != 0 ||
        written != count * 8) {
        throw CheckpointError(CheckpointError::Kind::Corrupt,
                              "array '" + name + "': data does not decode to " +
                                  std::to_string(count) + " doubles");
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (std::size_t k = 0; k < 8; ++k) {
            bits |= std::uint64_t{bytes[i * 8 + k]} << (8 * k);
        }
        values[i] = std::bit_cast<double>(bits);
    }
    return values;
}

} // namespace

std::string encode_checkpoint(const Checkpoint &ckpt) {
    nlohmann::json doc;
    doc["format"] = kCheckpointFormat;
    doc["version"] = kCheckpointVersion;
    doc["kind"] = ckpt.kind;
    doc["metadata"] = ckpt.metadata;
    auto arrays = nlohmann::json::array();
    for (const auto &[name, t] : ckpt.arrays) {
        arrays.push_back({{"name", name},
                          {"shape", t.shape},
                          {"dtype", kDtype},
                          {"data", encode_values(t.values)}});
    }
    doc["arrays"] = std::move(arrays);
    return doc.dump(1) + "\n";
}

Checkpoint decode_checkpoint(std::string_view text) {
    using Kind = CheckpointError::Kind;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw CheckpointError(Kind::Corrupt,
                              std::string("checkpoint is not valid JSON: ") +
                                  e.what());
    }
    try {
        if (!doc.is_object() || doc.value("format", "") != kCheckpointFormat) {
            throw CheckpointError(Kind::Corrupt, "not a checkpoint document");
        }
        const int version = doc.at("version").get<int>();
        if (version != kCheckpointVersion) {
            throw CheckpointError(Kind::Version,
                                  "checkpoint version " +
                                      std::to_string(version) +
                                      " is not supported (expected " +
                                      std::to_string(kCheckpointVersion) + ")");
        }
        Checkpoint ckpt;
        ckpt.kind = doc.at("kind").get<std::string>();
        ckpt.metadata = doc.value("metadata", nlohmann::json::object());
        for (const auto &a : doc.at("arrays")) {
            const auto name = a.at("name").get<std::string>();
            if (a.at("dtype").get<std::string>() != kDtype) {
                throw CheckpointError(Kind::Corrupt,
                                      "array '" + name + "': unknown dtype");
            }
            Tensor t(a.at("shape").get<std::vector<std::size_t>>());
            t.values = decode_values(a.at("data").get<std::string>(), t.size(),
                                     name);
            ckpt.arrays.emplace_back(name, std::move(t));
        }
        return ckpt;
    } catch (const nlohmann::json::exception &e) {
        throw CheckpointError(Kind::Corrupt,
                              std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw CheckpointError(CheckpointError::Kind::Io,
                              "cannot write " + path.string());
    }
    os << encode_checkpoint(ckpt);
    if (!os) {
        throw CheckpointError(CheckpointError::Kind::Io,
                              "write failed for " + path.string());
    }
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw CheckpointError(CheckpointError::Kind::Io,
                              "cannot read " + path.string());
    }
    std::stringstream buffer;
    buffer << is.rdbuf();
    return decode_checkpoint(buffer.str());
}

const Tensor &require_array(const Checkpoint &ckpt, std::string_view name,
                            const std::vector<std::size_t> &shape) {
    for (const auto &[n, t] : ckpt.arrays) {
        if (n == name) {
            if (t.shape != shape) {
                throw CheckpointError(CheckpointError::Kind::Shape,
                                      "array '" + n + "' has shape " +
                                          shape_string(t.shape) +
                                          ", expected " + shape_string(shape));
            }
            return t;
        }
    }
    throw CheckpointError(CheckpointError::Kind::Shape,
                          "array '" + std::string(name) + "' missing");
}

void require_kind(const Checkpoint &ckpt, std::string_view kind) {
    if (ckpt.kind != kind) {
        throw CheckpointError(CheckpointError::Kind::Corrupt,
                              "checkpoint holds '" + ckpt.kind +
                                  "' weights, expected '" + std::string(kind) +
                                  "'");
    }
}

} // namespace qaoa
