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

#include <gtest/gtest.h>

#include "bdsw/hashing.hpp"

using namespace bdsw;

namespace {

Ensemble random_ensemble(Rng& rng, std::size_t n) {
  std::vector<PairState> p(n);
  for (auto& q : p) {
    q.a = coin(rng);
    q.b = coin(rng);
  }
  return Ensemble(std::move(p));
}

}  // namespace

TEST(Bicnot, HandEntries) {
  auto [c, t] = bicnot({1, 0}, {0, 1});
  EXPECT_EQ(c, (PairState{1, 1}));
  EXPECT_EQ(t, (PairState{1, 1}));
  std::tie(c, t) = bicnot({0, 0}, {0, 0});
  EXPECT_EQ(c, PairState{});
  EXPECT_EQ(t, PairState{});
}

TEST(Bicnot, IsAnInvolution) {
  for (int in = 0; in < 16; ++in) {
    const PairState c{static_cast<Bit>(in >> 3 & 1), static_cast<Bit>(in >> 2 & 1)};
    const PairState t{static_cast<Bit>(in >> 1 & 1), static_cast<Bit>(in & 1)};
    auto [c1, t1] = bicnot(c, t);
    auto [c2, t2] = bicnot(c1, t1);
    EXPECT_EQ(c2, c);
    EXPECT_EQ(t2, t);
  }
}

TEST(ParityRound, ZRoundRevealsBitParity) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto e = random_ensemble(rng, 2 + uniform_index(rng, 10));
    auto [subset, dest] = draw_round(e, rng);
    Bit parity = 0;
    for (auto i : subset) parity ^= e[i].a;
    const auto out = z_parity_round(e, subset, dest, rng);
    EXPECT_EQ(out.round.syndrome(), parity);
    EXPECT_FALSE(out.ensemble.alive(dest));
    for (auto i : subset) {
      if (i == dest) continue;
      EXPECT_EQ(out.ensemble[i].a, e[i].a);
      EXPECT_EQ(out.ensemble[i].b, e[i].b ^ e[dest].b);  // backward action
    }
  }
}

TEST(ParityRound, XRoundRevealsPhaseParity) {
  Rng rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const auto e = random_ensemble(rng, 2 + uniform_index(rng, 10));
    auto [subset, dest] = draw_round(e, rng);
    Bit parity = 0;
    for (auto i : subset) parity ^= e[i].b;
    const auto out = x_parity_round(e, subset, dest, rng);
    EXPECT_EQ(out.round.syndrome(), parity);
    for (auto i : subset) {
      if (i == dest) continue;
      EXPECT_EQ(out.ensemble[i].b, e[i].b);
      EXPECT_EQ(out.ensemble[i].a, e[i].a ^ e[dest].a);
    }
  }
}

TEST(ParityRound, NonSubsetPairsUntouched) {
  const auto e = ensemble_from_strings(bits_from_string("1111"), bits_from_string("1111"));
  const std::vector<std::size_t> subset{0, 2};
  const auto out = z_parity_round(e, subset, 2, Bit{0});
  EXPECT_EQ(out.ensemble[1], e[1]);
  EXPECT_EQ(out.ensemble[3], e[3]);
}

TEST(ParityRound, RejectsBadRounds) {
  Ensemble e(std::vector<PairState>(4));
  const std::vector<std::size_t> one{1}, unsorted{2, 1}, pair{1, 2};
  EXPECT_THROW(z_parity_round(e, one, 1, Bit{0}), std::invalid_argument);
  EXPECT_THROW(z_parity_round(e, unsorted, 1, Bit{0}), std::invalid_argument);
  EXPECT_THROW(z_parity_round(e, pair, 3, Bit{0}), std::invalid_argument);
  e.discard(2);
  EXPECT_THROW(x_parity_round(e, pair, 1, Bit{0}), std::invalid_argument);
}

TEST(CandidateSet, SameBasisRoundFilters) {
  const Ensemble e(std::vector<PairState>(4));
  auto c = CandidateSet::hamming_ball(CandidateKind::Bit, {0, 1, 2, 3}, 1);
  ASSERT_EQ(c.size(), 5u);
  const std::vector<std::size_t> subset{0, 1};
  const auto out = z_parity_round(e, subset, 1, Bit{0});
  const auto next = candidate_update(c, out.round);
  // Parity 0 over {0,1}: 0000, 0010, 0001 survive, projected to 3 coordinates.
  EXPECT_EQ(next.size(), 3u);
  EXPECT_EQ(next.indices, (std::vector<std::size_t>{0, 2, 3}));
}

TEST(CandidateSet, TrackedDestinationNeverGrows) {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 3 + uniform_index(rng, 8);
    auto e = random_ensemble(rng, n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    auto c = CandidateSet::hamming_ball(CandidateKind::Phase, idx, 2);
    while (e.live_count() >= 2) {
      auto [subset, dest] = draw_round(e, rng);
      auto out = z_parity_round(e, subset, dest, rng);
      const auto next = candidate_update(c, out.round);
      EXPECT_LE(next.size(), c.size());
      c = next;
      e = out.ensemble;
    }
  }
}

TEST(CandidateSet, UntrackedDestinationAtMostDoubles) {
  Rng rng(32);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + uniform_index(rng, 6);
    auto e = random_ensemble(rng, n);
    std::vector<std::size_t> tracked;
    for (std::size_t i = 1; i < n; ++i) tracked.push_back(i);
    auto c = CandidateSet::exact_weight(CandidateKind::Phase, tracked, 1);
    const std::vector<std::size_t> subset{0, 1, 2};
    auto out = z_parity_round(e, subset, 0, rng);
    const auto next = candidate_update(c, out.round);
    EXPECT_LE(next.size(), 2 * c.size());
    EXPECT_GT(next.size(), c.size());
    const auto known = candidate_update(c, out.round, Bit{1});
    EXPECT_LE(known.size(), c.size());
  }
}

TEST(CandidateSet, TruthStaysInsideThroughRounds) {
  Rng rng(33);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + uniform_index(rng, 6);
    std::vector<PairState> p(n);
    p[uniform_index(rng, n)].b = 1;
    Ensemble e(p);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    auto c = CandidateSet::hamming_ball(CandidateKind::Phase, idx, 1);
    while (e.live_count() >= 2) {
      auto [subset, dest] = draw_round(e, rng);
      auto out = coin(rng) ? z_parity_round(e, subset, dest, rng) : x_parity_round(e, subset, dest, rng);
      c = candidate_update(c, out.round);
      e = out.ensemble;
      ASSERT_TRUE(c.contains_restriction(e));
    }
  }
}

TEST(CandidateSet, AnalyticBookkeeping) {
  auto c = CandidateSet::analytic(CandidateKind::Phase, {0, 1, 2}, 5.0);
  ParityRound r;
  r.basis = Basis::Z;
  r.subset = {2, 7};
  r.dest = 7;
  EXPECT_DOUBLE_EQ(candidate_update(c, r).log2_count, 6.0);
  r.basis = Basis::X;
  r.subset = {1, 2};
  r.dest = 2;
  EXPECT_DOUBLE_EQ(candidate_update(c, r).log2_count, 4.0);
}
