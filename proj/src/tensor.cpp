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
#include "qaoa/tensor.hpp"

#include <functional>
#include <numeric>
#include <stdexcept>

namespace qaoa {

Tensor::Tensor(std::vector<std::size_t> shape_, double fill)
    : shape(std::move(shape_)) {
    const std::size_t n = std::accumulate(shape.begin(), shape.end(),
                                          std::size_t{1}, std::multiplies<>());
    values.assign(n, fill);
}

std::string shape_string(const std::vector<std::size_t> &shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

std::vector<double> flatten(const NamedTensors &tensors) {
    std::vector<double> flat;
    for (const auto &[name, t] : tensors) {
        flat.insert(flat.end(), t.values.begin(), t.values.end());
    }
    return flat;
}

void unflatten_into(NamedTensors &tensors, const std::vector<double> &flat) {
    std::size_t offset = 0;
    for (auto &[name, t] : tensors) {
        if (offset + t.size() > flat.size()) {
            throw std::invalid_argument("flat vector too short for " + name);
        }
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                    t.size(), t.values.begin());
        offset += t.size();
    }
    if (offset != flat.size()) {
        throw std::invalid_argument("flat vector longer than the tensors");
    }
}

} // namespace qaoa
