// Copyright 2026 The qlocomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace qlocomp {

/// Counter-based seed splitting. Every consumer of randomness asks for the
/// engine of (root seed, stream, index); results never depend on the order
/// in which streams are drawn, so parallel restarts stay reproducible.
enum class Stream : std::uint64_t {
  OptimizerRestart = 1,
  CentralElement = 2,
  MatrixUnits = 3,
  Generator = 4,
  Check = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, Stream stream,
                                    std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(root) ^
                               static_cast<std::uint64_t>(stream)) ^
                    index);
}

inline std::mt19937_64 make_engine(std::uint64_t root, Stream stream,
                                   std::uint64_t index) {
  return std::mt19937_64(derive_seed(root, stream, index));
}

}  // namespace qlocomp
