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

#include "bdsw/random.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bdsw {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  // FNV-1a over the stream name, then mixed with the master seed.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::uint64_t state = master ^ h;
  splitmix64(state);
  return splitmix64(state);
}

std::vector<std::size_t> sample_positions(Rng& rng, std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("sample_positions: k > n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<std::size_t> random_subset(Rng& rng, std::size_t n) {
  if (n < 2) throw std::invalid_argument("random_subset: need at least two positions");
  std::vector<std::size_t> out;
  do {
    out.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (coin(rng)) out.push_back(i);
  } while (out.size() < 2);
  return out;
}

}  // namespace bdsw
