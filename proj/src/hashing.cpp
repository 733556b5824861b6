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

#include "bdsw/hashing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace bdsw {

std::pair<PairState, PairState> bicnot(PairState control, PairState target) {
  const Bit b_target = target.b;
  target.a ^= control.a;
  control.b ^= b_target;
  return {control, target};
}

namespace {

void check_round(const Ensemble& e, std::span<const std::size_t> subset, std::size_t dest) {
  if (subset.size() < 2) throw std::invalid_argument("parity round: subset needs at least two pairs");
  if (!std::is_sorted(subset.begin(), subset.end()) ||
      std::adjacent_find(subset.begin(), subset.end()) != subset.end())
    throw std::invalid_argument("parity round: subset must be sorted and distinct");
  if (!std::binary_search(subset.begin(), subset.end(), dest))
    throw std::invalid_argument("parity round: destination not in subset");
  for (auto i : subset) {
    if (i >= e.size()) throw std::invalid_argument("parity round: index out of range");
    if (!e.alive(i)) throw std::invalid_argument("parity round: index refers to a discarded pair");
  }
}

}  // namespace

RoundOutcome z_parity_round(const Ensemble& e, std::span<const std::size_t> subset,
                            std::size_t dest, Bit alice_outcome) {
  check_round(e, subset, dest);
  Ensemble out = e;
  for (auto c : subset) {
    if (c == dest) continue;
    auto [nc, nt] = bicnot(out[c], out[dest]);
    out[c] = nc;
    out[dest] = nt;
  }
  ParityRound r;
  r.basis = Basis::Z;
  r.subset.assign(subset.begin(), subset.end());
  r.dest = dest;
  r.dest_tagged = e[dest].tagged;
  r.parity_alice = alice_outcome & 1u;
  r.parity_bob = r.parity_alice ^ out[dest].a;
  out.discard(dest);
  return {std::move(r), std::move(out)};
}

RoundOutcome z_parity_round(const Ensemble& e, std::span<const std::size_t> subset,
                            std::size_t dest, Rng& rng) {
  return z_parity_round(e, subset, dest, static_cast<Bit>(coin(rng)));
}

RoundOutcome x_parity_round(const Ensemble& e, std::span<const std::size_t> subset,
                            std::size_t dest, Bit alice_outcome) {
  check_round(e, subset, dest);
  Ensemble out = e;
  // X-basis bi-CNOT onto d is a Z-basis bi-CNOT with d as the control.
  for (auto c : subset) {
    if (c == dest) continue;
    auto [nd, nc] = bicnot(out[dest], out[c]);
    out[dest] = nd;
    out[c] = nc;
  }
  ParityRound r;
  r.basis = Basis::X;
  r.subset.assign(subset.begin(), subset.end());
  r.dest = dest;
  r.dest_tagged = e[dest].tagged;
  r.parity_alice = alice_outcome & 1u;
  r.parity_bob = r.parity_alice ^ out[dest].b;
  out.discard(dest);
  return {std::move(r), std::move(out)};
}

RoundOutcome x_parity_round(const Ensemble& e, std::span<const std::size_t> subset,
                            std::size_t dest, Rng& rng) {
  return x_parity_round(e, subset, dest, static_cast<Bit>(coin(rng)));
}

std::pair<std::vector<std::size_t>, std::size_t> draw_round(const Ensemble& e, Rng& rng) {
  const auto live = e.live_indices();
  auto pos = random_subset(rng, live.size());
  std::vector<std::size_t> subset;
  subset.reserve(pos.size());
  for (auto p : pos) subset.push_back(live[p]);
  const std::size_t dest = subset[uniform_index(rng, subset.size())];
  return {std::move(subset), dest};
}

bool CandidateSet::contains_restriction(const Ensemble& e) const {
  BitString s;
  s.reserve(indices.size());
  for (auto i : indices) s.push_back(kind == CandidateKind::Bit ? e[i].a : e[i].b);
  return members.count(s) > 0;
}

namespace {

void enumerate_weights(std::size_t n, std::size_t lo, std::size_t hi, std::set<BitString>& out) {
  if (n > 24) throw std::invalid_argument("CandidateSet: too many coordinates to enumerate");
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) {
    const auto w = static_cast<std::size_t>(std::popcount(m));
    if (w < lo || w > hi) continue;
    BitString s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = (m >> i) & 1u;
    out.insert(std::move(s));
  }
}

}  // namespace

CandidateSet CandidateSet::hamming_ball(CandidateKind kind, std::vector<std::size_t> indices,
                                        std::size_t radius) {
  CandidateSet c;
  c.kind = kind;
  c.indices = std::move(indices);
  std::sort(c.indices.begin(), c.indices.end());
  enumerate_weights(c.indices.size(), 0, radius, c.members);
  c.log2_count = std::log2(static_cast<double>(c.members.size()));
  return c;
}

CandidateSet CandidateSet::exact_weight(CandidateKind kind, std::vector<std::size_t> indices,
                                        std::size_t weight) {
  CandidateSet c;
  c.kind = kind;
  c.indices = std::move(indices);
  std::sort(c.indices.begin(), c.indices.end());
  enumerate_weights(c.indices.size(), weight, weight, c.members);
  c.log2_count = c.members.empty() ? 0.0 : std::log2(static_cast<double>(c.members.size()));
  return c;
}

CandidateSet CandidateSet::analytic(CandidateKind kind, std::vector<std::size_t> indices,
                                    double log2_count) {
  CandidateSet c;
  c.kind = kind;
  c.indices = std::move(indices);
  std::sort(c.indices.begin(), c.indices.end());
  c.log2_count = log2_count;
  c.enumerated = false;
  return c;
}

CandidateSet candidate_update(const CandidateSet& c, const ParityRound& round,
                              std::optional<Bit> dest_state_known) {
  const bool conjugate = (c.kind == CandidateKind::Phase && round.basis == Basis::Z) ||
                         (c.kind == CandidateKind::Bit && round.basis == Basis::X);

  // Coordinates of subset members and destination within the tracked indices.
  auto pos_of = [&](std::size_t stable) -> std::optional<std::size_t> {
    auto it = std::lower_bound(c.indices.begin(), c.indices.end(), stable);
    if (it == c.indices.end() || *it != stable) return std::nullopt;
    return static_cast<std::size_t>(it - c.indices.begin());
  };
  const auto dpos = pos_of(round.dest);
  std::vector<std::size_t> ctrl_pos;
  bool subset_fully_tracked = dpos.has_value();
  for (auto s : round.subset) {
    if (s == round.dest) continue;
    if (auto p = pos_of(s)) ctrl_pos.push_back(*p);
    else subset_fully_tracked = false;
  }

  CandidateSet out;
  out.kind = c.kind;
  out.enumerated = c.enumerated;
  for (auto i : c.indices)
    if (i != round.dest) out.indices.push_back(i);

  if (!c.enumerated) {
    out.log2_count = c.log2_count;
    if (conjugate) {
      if (!dpos && !dest_state_known) out.log2_count += 1.0;
    } else if (subset_fully_tracked) {
      out.log2_count = std::max(0.0, out.log2_count - 1.0);
    }
    return out;
  }

  auto project = [&](BitString s) {
    if (dpos) s.erase(s.begin() + static_cast<std::ptrdiff_t>(*dpos));
    return s;
  };

  for (const auto& m : c.members) {
    if (conjugate) {
      std::vector<Bit> dvals;
      if (dest_state_known) {
        if (dpos && m[*dpos] != *dest_state_known) continue;
        dvals.push_back(*dest_state_known);
      } else if (dpos) {
        dvals.push_back(m[*dpos]);
      } else {
        dvals = {0, 1};
      }
      for (Bit dv : dvals) {
        BitString s = m;
        if (dv)
          for (auto p : ctrl_pos) s[p] ^= 1;
        out.members.insert(project(std::move(s)));
      }
    } else {
      if (subset_fully_tracked) {
        Bit par = m[*dpos];
        for (auto p : ctrl_pos) par ^= m[p];
        if (par != round.syndrome()) continue;
      }
      out.members.insert(project(m));
    }
  }
  out.log2_count = out.members.empty() ? 0.0 : std::log2(static_cast<double>(out.members.size()));
  return out;
}

}  // namespace bdsw
