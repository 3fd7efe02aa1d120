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
 * @file Checkpoint container shared by the GRU and CNN weights.
 *
 * A checkpoint is a JSON document:
 *
 *   {
 *     "format": "qaoa-init-checkpoint",
 *     "version": 1,
 *     "kind": "gru" | "cnn",
 *     "metadata": { ... },
 *     "arrays": [ {"name": "W_z", "shape": [32, 3],
 *                  "dtype": "float64-le", "data": "<base64>"}, ... ]
 *   }
 *
 * Array data is the little-endian IEEE-754 encoding of the row-major values,
 * base64 encoded (standard alphabet, padded), so round trips are bit-exact.
 */
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "qaoa/tensor.hpp"

namespace qaoa {

inline constexpr int kCheckpointVersion = 1;
inline constexpr std::string_view kCheckpointFormat = "qaoa-init-checkpoint";

class CheckpointError : public std::runtime_error {
  public:
    enum class Kind { Corrupt, Version, Shape, Io };

    CheckpointError(Kind kind, const std::string &what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

struct Checkpoint {
    std::string kind;
    nlohmann::json metadata = nlohmann::json::object();
    NamedTensors arrays;
};

std::string encode_checkpoint(const Checkpoint &ckpt);
/// @throws CheckpointError (Corrupt or Version).
Checkpoint decode_checkpoint(std::string_view text);

void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path);
Checkpoint load_checkpoint(const std::filesystem::path &path);

/// Looks up an array and checks its shape.
/// @throws CheckpointError (Shape) naming the array on mismatch or absence.
const Tensor &require_array(const Checkpoint &ckpt, std::string_view name,
                            const std::vector<std::size_t> &shape);

/// @throws CheckpointError (Corrupt) if ckpt.kind differs.
void require_kind(const Checkpoint &ckpt, std::string_view kind);

} // namespace qaoa
