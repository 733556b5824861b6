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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bdsw {

using Bit = std::uint8_t;
/// Unpacked bit string, one element per bit (0 or 1).
using BitString = std::vector<Bit>;

/// Packed GF(2) vector of fixed length.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}
  static BitVector from_bits(std::span<const Bit> bits);
  static BitVector from_indices(std::size_t n, std::span<const std::size_t> idx);

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v) words_[i >> 6] |= m; else words_[i >> 6] &= ~m;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::size_t popcount() const;
  bool any() const;
  /// Inner product over GF(2).
  bool dot(const BitVector& o) const;
  BitVector& operator^=(const BitVector& o);
  bool operator==(const BitVector& o) const = default;

  std::vector<std::size_t> ones() const;
  BitString to_bits() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  /// Big-endian hex: bit 0 is the most significant bit of the first digit,
  /// padded with zeros to a multiple of four bits.
  std::string to_hex() const;
  static BitVector from_hex(std::string_view hex, std::size_t n);

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

inline BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

std::size_t hamming_weight(std::span<const Bit> s);
Bit dot(std::span<const Bit> a, std::span<const Bit> b);
std::string to_string(std::span<const Bit> s);
BitString bits_from_string(std::string_view s);

/// Hex encoding of an unpacked bit list with the same convention as BitVector.
std::string bits_to_hex(std::span<const Bit> s);
BitString bits_from_hex(std::string_view hex, std::size_t n);

/// Rank of a set of GF(2) rows (all of equal length).
std::size_t gf2_rank(std::vector<BitVector> rows);

/// Solution space of A x = b over GF(2) as particular solution plus kernel
/// basis. `consistent` is false when no solution exists.
struct Gf2Solution {
  bool consistent = false;
  std::size_t rank = 0;
  BitVector particular;
  std::vector<BitVector> kernel;
  std::vector<std::size_t> pivots;
};
Gf2Solution gf2_solve(const std::vector<BitVector>& rows, const BitVector& rhs,
                      std::size_t n_cols);

}  // namespace bdsw
