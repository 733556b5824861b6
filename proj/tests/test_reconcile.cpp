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

#include <algorithm>
#include <cmath>

#include "bdsw/rates.hpp"
#include "bdsw/reconcile.hpp"

using namespace bdsw;

namespace {

Ensemble with_bit_errors(std::size_t n, std::span<const std::size_t> errors) {
  std::vector<PairState> p(n);
  for (auto i : errors) p[i].a = 1;
  return Ensemble(std::move(p));
}

Ensemble random_weight(Rng& rng, std::size_t n, std::size_t w) {
  return with_bit_errors(n, sample_positions(rng, n, w));
}

}  // namespace

TEST(ParityMatrix, TextRoundTrip) {
  Rng rng(1);
  const auto m = random_parity_matrix(20, 8, rng);
  const auto text = m.serialize();
  EXPECT_EQ(text.substr(0, 5), "8 20\n");
  const auto back = ParityMatrix::parse(text);
  EXPECT_EQ(back.rows, m.rows);
  EXPECT_EQ(back.n_cols, 20u);
  EXPECT_THROW(ParityMatrix::parse("2 4\nf\n"), std::invalid_argument);
  EXPECT_THROW(ParityMatrix::parse("1 4\nf\nf\n"), std::invalid_argument);
}

TEST(ParityMatrix, RandomRowsFitShrinkingEnsemble) {
  Rng rng(2);
  const auto m = random_parity_matrix(30, 20, rng);
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    const auto ones = m.rows[i].ones();
    EXPECT_GE(ones.size(), 2u);
    EXPECT_LT(ones.back(), 30 - i);
  }
  EXPECT_THROW(random_parity_matrix(5, 5, rng), std::invalid_argument);
}

TEST(Budget, Values) {
  EXPECT_EQ(ec_round_budget(100, 0.0, 0), 0u);
  EXPECT_EQ(ec_round_budget(100, 0.11, 0), 50u);
  EXPECT_EQ(ec_round_budget(100, 0.11, 10), 60u);
  EXPECT_EQ(ec_round_budget(100, 0.5 - 1e-12, 0), 100u);
  EXPECT_THROW(ec_round_budget(100, 0.5, 0), std::domain_error);
}

TEST(DecodeExhaustive, SmallCases) {
  ParityMatrix m;
  m.n_cols = 6;
  m.rows = {BitVector::from_bits(bits_from_string("110000")), BitVector::from_bits(bits_from_string("011100"))};
  const BitString zero{0, 0};
  auto c = decode_exhaustive(zero, m, 0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(hamming_weight(c.front()), 0u);
  const BitString one{1, 1};
  EXPECT_TRUE(decode_exhaustive(one, m, 0).empty());
  c = decode_exhaustive(one, m, 1);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(to_string(c.front()), "010000");
  EXPECT_THROW(decode_exhaustive(one, m, 1, 3), DecodeError);
}

TEST(DecodeGaussian, IdentityLikeRowsReadOffDifferences) {
  ParityMatrix m;
  m.n_cols = 8;
  const BitString truth = bits_from_string("00100100");
  BitString syn;
  for (std::size_t i = 0; i + 1 < 8; ++i) {
    BitVector r(8);
    r.set(i, true);
    r.set(7, true);
    m.rows.push_back(r);
    syn.push_back(truth[i] ^ truth[7]);
  }
  EXPECT_EQ(decode_gaussian(syn, m), truth);
  EXPECT_EQ(decode_gaussian(BitString(7, 0), m), BitString(8, 0));
}

TEST(DecodeGaussian, AgreesWithExhaustive) {
  Rng rng(3);
  std::size_t singletons = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 6 + uniform_index(rng, 9);
    const std::size_t rows = n / 2 + uniform_index(rng, n / 2);
    ParityMatrix m;
    m.n_cols = n;
    for (std::size_t i = 0; i < rows; ++i) m.rows.push_back(BitVector::from_indices(n, random_subset(rng, n)));
    const auto truth = BitVector::from_indices(n, sample_positions(rng, n, uniform_index(rng, 3)));
    BitString syn;
    for (const auto& r : m.rows) syn.push_back(r.dot(truth));
    const auto all = decode_exhaustive(syn, m, n);
    const auto g = decode_gaussian(syn, m, n);
    EXPECT_NE(std::find(all.begin(), all.end(), g), all.end());
    if (decode_exhaustive(syn, m, hamming_weight(g)).size() == 1) {
      ++singletons;
      EXPECT_EQ(decode_exhaustive(syn, m, hamming_weight(g)).front(), g);
    }
  }
  EXPECT_GT(singletons, 0u);
}

TEST(DecodeGaussian, RecoversWeightTwoAtTwentyFour) {
  Rng rng(4);
  std::size_t unique = 0;
  for (int t = 0; t < 50; ++t) {
    const auto e = random_weight(rng, 24, 2);
    const auto m = random_parity_matrix(24, 14, rng);
    auto r = run_ec(e, m, rng, {2, Decoder::Gaussian});
    if (r.ec.report.decode_status == DecodeStatus::Unique) {
      ++unique;
      EXPECT_EQ(r.ec.report.residual_bit_errors, 0u);
    }
  }
  EXPECT_GE(unique, 45u);
}

TEST(DecodeGaussian, InconsistentSystemIsAnError) {
  ParityMatrix m;
  m.n_cols = 3;
  m.rows = {BitVector::from_bits(bits_from_string("110")), BitVector::from_bits(bits_from_string("110"))};
  const BitString syn{0, 1};
  EXPECT_THROW(decode_gaussian(syn, m), DecodeError);
}

TEST(RunEc, NoiselessStaysClean) {
  Rng rng(5);
  const auto e = with_bit_errors(16, {});
  const auto r = run_ec(e, random_parity_matrix(16, 6, rng), rng, {0});
  EXPECT_EQ(r.ec.report.decode_status, DecodeStatus::Unique);
  EXPECT_TRUE(r.ec.report.corrected_positions.empty());
  EXPECT_EQ(r.ensemble.live_count(), 10u);
}

std::size_t unique_single_flips(std::size_t rounds, int trials, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t unique = 0;
  for (int t = 0; t < trials; ++t) {
    const auto e = random_weight(rng, 12, 1);
    const auto r = run_ec(e, random_parity_matrix(12, rounds, rng), rng, {1});
    if (r.ec.report.decode_status == DecodeStatus::Unique) {
      ++unique;
      EXPECT_EQ(r.ec.report.residual_bit_errors, 0u);
    }
  }
  return unique;
}

double three_sigma(double p, int trials) { return 3.0 * std::sqrt(p * (1 - p) / trials); }

TEST(RunEc, SingleFlipAtTwelveMeetsUnionBound) {
  constexpr int kTrials = 2000;
  const double bound = 1.0 - 12.0 / 64.0;
  const auto unique = unique_single_flips(6, kTrials, 6);
  EXPECT_GE(unique / double(kTrials), bound - three_sigma(bound, kTrials));
}

TEST(RunEc, SingleFlipAtTwelveWithTenRounds) {
  constexpr int kTrials = 2000;
  const double target = 1.0 - 1.0 / 32.0;
  const auto unique = unique_single_flips(10, kTrials, 7);
  EXPECT_GE(unique / double(kTrials), target - three_sigma(target, kTrials));
}

TEST(RunEc, OutOfRadius) {
  Rng rng(7);
  const std::size_t err[] = {1, 4, 7};
  const auto r = run_ec(with_bit_errors(12, err), random_parity_matrix(12, 11, rng), rng, {1});
  EXPECT_EQ(r.ec.report.decode_status, DecodeStatus::OutOfRadius);
}

TEST(RunEc, CorrectedSurvivorsHaveZeroSyndrome) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto e = random_weight(rng, 20, 2);
    const auto r = run_ec(e, random_parity_matrix(20, 14, rng), rng, {2});
    if (r.ec.report.decode_status != DecodeStatus::Unique) continue;
    // Recompute every announced parity on the corrected survivors plus the
    // estimated values of the discarded destinations.
    BitString est(20, 0);
    for (std::size_t j = 0; j < 20; ++j) est[j] = e[j].a;
    for (auto p : r.ec.report.corrected_positions) EXPECT_EQ(e[p].a, 1);
    for (auto i : r.ensemble.live_indices()) EXPECT_EQ(r.ensemble[i].a, 0);
    for (std::size_t k = 0; k < r.ec.linearized.n_rows(); ++k) {
      Bit s = 0;
      for (auto j : r.ec.linearized.rows[k].ones()) s ^= est[j];
      EXPECT_EQ(s, r.ec.transcript[k].syndrome());
    }
  }
}

TEST(RunEc, PhaseCandidatesDoNotGrowWithUntaggedDestinations) {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 10;
    std::vector<PairState> p(n);
    p[uniform_index(rng, n)].b = 1;
    Ensemble e(p);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    auto c = CandidateSet::hamming_ball(CandidateKind::Phase, idx, 1);
    const auto r = run_ec(e, random_parity_matrix(n, 5, rng), rng, {0});
    for (const auto& round : r.ec.transcript) {
      const auto next = candidate_update(c, round);
      EXPECT_LE(next.size(), c.size());
      c = next;
    }
    EXPECT_TRUE(c.contains_restriction(r.ensemble));
  }
}

TEST(RunEcFixed, CorrectsAndVerifies) {
  Rng rng(10);
  for (int t = 0; t < 40; ++t) {
    const auto e = random_weight(rng, 40, 2);
    Rng alice(100 + t);
    EnsembleChannel ch(e, alice);
    FixedEcOptions o;
    o.rounds = ec_round_budget(40, 0.05, 4);
    o.radius = 2;
    const auto r = run_ec_fixed(ch, rng, o);
    ASSERT_EQ(r.report.decode_status, DecodeStatus::Unique);
    for (auto i : ch.ensemble().live_indices()) EXPECT_EQ(ch.ensemble()[i].a, 0);
    EXPECT_EQ(r.report.rounds_used, r.transcript.size());
  }
}

TEST(RunEcAdaptive, LongStringsEndClean) {
  ChannelParams cp;
  cp.delta_b = 0.05;
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng rng(s), alice(s + 50), pub(s + 90);
    EnsembleChannel ch(sample_ensemble(cp, 1024, rng), alice);
    Transcript log;
    const auto r = run_ec_adaptive(ch, pub, {}, &log);
    if (r.report.decode_status != DecodeStatus::Unique) continue;
    EXPECT_EQ(hamming_weight(ch.ensemble().strings().first), 0u);
    EXPECT_EQ(r.schedule.n_rows(), r.report.rounds_used);
    EXPECT_GT(log.size(), 2 * r.report.rounds_used);
  }
}

TEST(RunEcAdaptive, RejectsBadOptions) {
  Rng rng(1), alice(2);
  EnsembleChannel ch(Ensemble(std::vector<PairState>(100)), alice);
  AdaptiveEcOptions o;
  o.block_size = 65;
  EXPECT_THROW(run_ec_adaptive(ch, rng, o), std::invalid_argument);
  o.block_size = 32;
  o.prior_delta = 0.0;
  EXPECT_THROW(run_ec_adaptive(ch, rng, o), std::invalid_argument);
}

TEST(BallVolume, SmallValues) {
  EXPECT_NEAR(log2_ball_volume(10, 0), 0.0, 1e-12);
  EXPECT_NEAR(log2_ball_volume(10, 1), std::log2(11.0), 1e-12);
  EXPECT_NEAR(log2_ball_volume(10, 10), 10.0, 1e-9);
}
