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

#include <stdexcept>
#include <string>

namespace qaoa {

/// Requested problem size exceeds what the statevector engine supports.
class ResourceLimitError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// A non-finite value appeared where a finite one is required.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad or incomplete experiment configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when a graph sampler cannot produce a usable instance.
class UnsatisfiableInstanceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qaoa
