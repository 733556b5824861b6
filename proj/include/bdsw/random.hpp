// Copyright 2026 The bdsw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace bdsw {

using Rng = std::mt19937_64;

/// Derives an independent seed for a named stream from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

inline Rng make_stream(std::uint64_t master, std::string_view stream) {
  return Rng(derive_seed(master, stream));
}

inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

inline bool bernoulli(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// k distinct positions out of n, uniformly, in increasing order.
std::vector<std::size_t> sample_positions(Rng& rng, std::size_t n, std::size_t k);

/// Uniform random subset of {0..n-1} with at least two members (resampled
/// until the size constraint holds), in increasing order.
std::vector<std::size_t> random_subset(Rng& rng, std::size_t n);

}  // namespace bdsw
