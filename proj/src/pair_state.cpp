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

#include "bdsw/pair_state.hpp"

#include <cmath>
#include <stdexcept>

namespace bdsw {

BellLabel bell_label(const PairState& p) {
  return static_cast<BellLabel>((p.a << 1) | p.b);
}

PairState from_bell_label(BellLabel label) {
  const auto v = static_cast<unsigned>(label);
  return PairState{static_cast<Bit>((v >> 1) & 1u), static_cast<Bit>(v & 1u)};
}

std::string_view to_string(BellLabel label) {
  switch (label) {
    case BellLabel::PhiPlus: return "phi+";
    case BellLabel::PhiMinus: return "phi-";
    case BellLabel::PsiPlus: return "psi+";
    case BellLabel::PsiMinus: return "psi-";
  }
  return "?";
}

PairState apply_pauli(PairState p, Pauli op) {
  switch (op) {
    case Pauli::I: break;
    case Pauli::X: p.a ^= 1; break;
    case Pauli::Z: p.b ^= 1; break;
    case Pauli::Y: p.a ^= 1; p.b ^= 1; break;
  }
  return p;
}

std::size_t Ensemble::live_count() const {
  std::size_t c = 0;
  for (bool a : alive_) c += a;
  return c;
}

void Ensemble::discard(std::size_t i) {
  if (!alive_.at(i)) throw std::logic_error("Ensemble::discard: pair already discarded");
  alive_[i] = false;
}

std::vector<std::size_t> Ensemble::live_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pairs_.size(); ++i)
    if (alive_[i]) out.push_back(i);
  return out;
}

std::pair<BitString, BitString> Ensemble::strings() const {
  BitString sb, sp;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (!alive_[i]) continue;
    sb.push_back(pairs_[i].a);
    sp.push_back(pairs_[i].b);
  }
  return {std::move(sb), std::move(sp)};
}

Ensemble Ensemble::transposed() const {
  Ensemble t = *this;
  for (auto& p : t.pairs_) std::swap(p.a, p.b);
  return t;
}

Ensemble ensemble_from_strings(std::span<const Bit> s_b, std::span<const Bit> s_p) {
  if (s_b.size() != s_p.size())
    throw std::invalid_argument("ensemble_from_strings: length mismatch");
  std::vector<PairState> pairs(s_b.size());
  for (std::size_t i = 0; i < s_b.size(); ++i) {
    pairs[i].a = s_b[i] & 1u;
    pairs[i].b = s_p[i] & 1u;
  }
  return Ensemble(std::move(pairs));
}

void ChannelParams::validate() const {
  auto rate_ok = [](double x) { return std::isfinite(x) && x >= 0.0 && x < 0.5; };
  if (!rate_ok(delta_b)) throw std::invalid_argument("ChannelParams: delta_b must be in [0, 1/2)");
  if (!rate_ok(delta_p)) throw std::invalid_argument("ChannelParams: delta_p must be in [0, 1/2)");
  if (!std::isfinite(tag_fraction) || tag_fraction < 0.0 || tag_fraction >= 1.0)
    throw std::invalid_argument("ChannelParams: tag_fraction must be in [0, 1)");
}

namespace {

std::size_t exact_count(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 1e-9));
}

// Positions for k marks; with `prefer`, positions inside `prefer` are used
// first (in random order) before spilling outside.
std::vector<std::size_t> place_marks(Rng& rng, std::size_t n, std::size_t k,
                                     const std::vector<std::size_t>* prefer) {
  if (!prefer) return sample_positions(rng, n, k);
  const std::size_t inside = std::min(k, prefer->size());
  std::vector<std::size_t> out;
  for (auto j : sample_positions(rng, prefer->size(), inside)) out.push_back((*prefer)[j]);
  if (inside < k) {
    std::vector<bool> used(n, false);
    for (auto p : *prefer) used[p] = true;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) rest.push_back(i);
    for (auto j : sample_positions(rng, rest.size(), k - inside)) out.push_back(rest[j]);
  }
  return out;
}

}  // namespace

Ensemble sample_ensemble(const ChannelParams& params, std::size_t n, Rng& rng) {
  params.validate();
  if (n == 0) throw std::invalid_argument("sample_ensemble: n must be at least 1");
  std::vector<PairState> pairs(n);

  if (params.sampling == Sampling::ExactCount) {
    const auto bit_pos = sample_positions(rng, n, exact_count(params.delta_b, n));
    for (auto i : bit_pos) pairs[i].a = 1;
    const auto phase_pos = place_marks(rng, n, exact_count(params.delta_p, n),
                                       params.correlate ? &bit_pos : nullptr);
    for (auto i : phase_pos) pairs[i].b = 1;
  } else {
    for (auto& p : pairs) p.a = bernoulli(rng, params.delta_b);
    for (auto& p : pairs) {
      if (!params.correlate) {
        p.b = bernoulli(rng, params.delta_p);
      } else if (params.delta_p <= params.delta_b) {
        p.b = p.a && bernoulli(rng, params.delta_b > 0 ? params.delta_p / params.delta_b : 0.0);
      } else {
        p.b = p.a || bernoulli(rng, (params.delta_p - params.delta_b) / (1.0 - params.delta_b));
      }
    }
  }

  std::vector<std::size_t> tag_pos;
  if (params.sampling == Sampling::ExactCount) {
    tag_pos = sample_positions(rng, n, exact_count(params.tag_fraction, n));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      if (bernoulli(rng, params.tag_fraction)) tag_pos.push_back(i);
  }
  for (auto i : tag_pos) {
    auto& p = pairs[i];
    p.tagged = true;
    switch (params.tag_basis) {
      case TagBasisMode::AllZ: p.tag_basis = Basis::Z; break;
      case TagBasisMode::AllX: p.tag_basis = Basis::X; break;
      case TagBasisMode::Uniform: p.tag_basis = coin(rng) ? Basis::X : Basis::Z; break;
    }
    // Alice's prior measurement randomizes the conjugate label; Eve is free
    // to leave the measured-basis label clean.
    if (p.tag_basis == Basis::Z) {
      p.b = coin(rng);
    } else {
      p.a = coin(rng);
      p.b = 0;
    }
  }
  return Ensemble(std::move(pairs));
}

}  // namespace bdsw
