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

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace qaoa {

/// Dense row-major array of doubles with an explicit shape.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape_, double fill = 0.0);

    [[nodiscard]] std::size_t size() const { return values.size(); }
    double &operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool operator==(const Tensor &) const = default;
};

std::string shape_string(const std::vector<std::size_t> &shape);

/// Ordered list of named parameter tensors; the checkpoint payload.
using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

/// Concatenates tensor values in list order.
std::vector<double> flatten(const NamedTensors &tensors);
/// Inverse of flatten(); sizes must match exactly.
void unflatten_into(NamedTensors &tensors, const std::vector<double> &flat);

} // namespace qaoa
