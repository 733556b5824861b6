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

#include "bdsw/bits.hpp"

#include <bit>
#include <stdexcept>

namespace bdsw {

BitVector BitVector::from_bits(std::span<const Bit> bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) v.set(i, true);
  return v;
}

BitVector BitVector::from_indices(std::size_t n, std::span<const std::size_t> idx) {
  BitVector v(n);
  for (auto i : idx) {
    if (i >= n) throw std::out_of_range("BitVector::from_indices: index out of range");
    v.set(i, true);
  }
  return v;
}

std::size_t BitVector::popcount() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool BitVector::any() const {
  for (auto w : words_)
    if (w) return true;
  return false;
}

bool BitVector::dot(const BitVector& o) const {
  if (o.n_ != n_) throw std::invalid_argument("BitVector::dot: length mismatch");
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & o.words_[i];
  return std::popcount(acc) & 1;
}

BitVector& BitVector::operator^=(const BitVector& o) {
  if (o.n_ != n_) throw std::invalid_argument("BitVector::operator^=: length mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
  return *this;
}

std::vector<std::size_t> BitVector::ones() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    auto x = words_[w];
    while (x) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(x)));
      x &= x - 1;
    }
  }
  return out;
}

BitString BitVector::to_bits() const {
  BitString out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = get(i);
  return out;
}

std::string BitVector::to_hex() const { return bits_to_hex(to_bits()); }

BitVector BitVector::from_hex(std::string_view hex, std::size_t n) {
  return from_bits(bits_from_hex(hex, n));
}

std::size_t hamming_weight(std::span<const Bit> s) {
  std::size_t w = 0;
  for (auto b : s) w += b & 1u;
  return w;
}

Bit dot(std::span<const Bit> a, std::span<const Bit> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  Bit acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc ^= a[i] & b[i];
  return acc;
}

std::string to_string(std::span<const Bit> s) {
  std::string out;
  out.reserve(s.size());
  for (auto b : s) out.push_back(b ? '1' : '0');
  return out;
}

BitString bits_from_string(std::string_view s) {
  BitString out;
  out.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bits_from_string: expected 0/1");
    out.push_back(c == '1');
  }
  return out;
}

std::string bits_to_hex(std::span<const Bit> s) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve((s.size() + 3) / 4);
  for (std::size_t i = 0; i < s.size(); i += 4) {
    unsigned nib = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nib <<= 1;
      if (i + j < s.size() && s[i + j]) nib |= 1;
    }
    out.push_back(kDigits[nib]);
  }
  return out;
}

BitString bits_from_hex(std::string_view hex, std::size_t n) {
  if (hex.size() != (n + 3) / 4) throw std::invalid_argument("bits_from_hex: length mismatch");
  BitString out(n, 0);
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const char c = hex[d];
    unsigned nib;
    if (c >= '0' && c <= '9') nib = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') nib = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') nib = static_cast<unsigned>(c - 'A' + 10);
    else throw std::invalid_argument("bits_from_hex: bad digit");
    for (std::size_t j = 0; j < 4; ++j) {
      const bool bit = (nib >> (3 - j)) & 1u;
      const std::size_t i = d * 4 + j;
      if (i < n) out[i] = bit;
      else if (bit) throw std::invalid_argument("bits_from_hex: nonzero padding");
    }
  }
  return out;
}

std::size_t gf2_rank(std::vector<BitVector> rows) {
  if (rows.empty()) return 0;
  const std::size_t n = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && !rows[piv].get(col)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r)
      if (rows[r].get(col)) rows[r] ^= rows[rank];
    ++rank;
  }
  return rank;
}

Gf2Solution gf2_solve(const std::vector<BitVector>& rows, const BitVector& rhs,
                      std::size_t n_cols) {
  if (rhs.size() != rows.size()) throw std::invalid_argument("gf2_solve: rhs size mismatch");
  // Augmented rows: column n_cols holds the right-hand side.
  std::vector<BitVector> m;
  m.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != n_cols) throw std::invalid_argument("gf2_solve: row width mismatch");
    BitVector a(n_cols + 1);
    for (auto c : rows[r].ones()) a.set(c, true);
    a.set(n_cols, rhs.get(r));
    m.push_back(std::move(a));
  }

  Gf2Solution sol;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n_cols && rank < m.size(); ++col) {
    std::size_t piv = rank;
    while (piv < m.size() && !m[piv].get(col)) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[rank], m[piv]);
    for (std::size_t r = 0; r < m.size(); ++r)
      if (r != rank && m[r].get(col)) m[r] ^= m[rank];
    sol.pivots.push_back(col);
    ++rank;
  }
  sol.rank = rank;
  for (std::size_t r = rank; r < m.size(); ++r)
    if (m[r].get(n_cols)) return sol;
  sol.consistent = true;

  sol.particular = BitVector(n_cols);
  for (std::size_t r = 0; r < rank; ++r) sol.particular.set(sol.pivots[r], m[r].get(n_cols));

  std::vector<bool> is_pivot(n_cols, false);
  for (auto p : sol.pivots) is_pivot[p] = true;
  for (std::size_t f = 0; f < n_cols; ++f) {
    if (is_pivot[f]) continue;
    BitVector k(n_cols);
    k.set(f, true);
    for (std::size_t r = 0; r < rank; ++r)
      if (m[r].get(f)) k.set(sol.pivots[r], true);
    sol.kernel.push_back(std::move(k));
  }
  return sol;
}

}  // namespace bdsw
