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

#include <cmath>
#include <complex>

#include "bdsw/hashing.hpp"
#include "bdsw/oracle.hpp"

using namespace bdsw;
using namespace bdsw::oracle;

namespace {

double five_sigma(std::size_t trials) { return 5.0 * std::sqrt(0.25 / static_cast<double>(trials)); }

Matrix2 random_unitary(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  const double t = u(rng) / 4.0, a = u(rng), b = u(rng), g = u(rng);
  const std::complex<double> i(0, 1);
  Matrix2 m;
  m << std::exp(i * (a + b)) * std::cos(t), -std::exp(i * (a - b)) * std::sin(t),
      std::exp(i * (b - a) + i * g) * std::sin(t), std::exp(i * g - i * (a + b)) * std::cos(t);
  return m;
}

}  // namespace

TEST(StateVector, BellPairsHaveTheirLabels) {
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const PairState p{Bit(a), Bit(b)};
      const PairState q{Bit(1 - a), Bit(b)};
      const PairState pairs[] = {p, q};
      const auto s = StateVector::bell_pairs(pairs);
      bool exact = false;
      EXPECT_EQ(s.label(0, &exact), p);
      EXPECT_TRUE(exact);
      EXPECT_EQ(s.label(1), q);
      EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    }
}

TEST(StateVector, RejectsTooManyQubits) {
  EXPECT_THROW(StateVector(13), std::invalid_argument);
}

TEST(Bicnot, TruthTableMatchesLabelAlgebra) {
  const auto table = bicnot_truth_table();
  ASSERT_EQ(table.size(), 16u);
  EXPECT_EQ(table.front().control_in, PairState{});
  EXPECT_EQ(table.front().control_out, PairState{});
  EXPECT_EQ(table.front().target_out, PairState{});
  for (const auto& e : table) EXPECT_TRUE(e.exact_bell);
  EXPECT_TRUE(check_bicnot(bicnot).empty());
}

TEST(Bicnot, WrongImplementationIsCaught) {
  const auto swapped = [](PairState c, PairState t) {
    auto [x, y] = bicnot(c, t);
    std::swap(x.a, x.b);
    return std::pair{x, y};
  };
  EXPECT_FALSE(check_bicnot(swapped).empty());
}

TEST(Channel, Validation) {
  EXPECT_NO_THROW(Channel::pauli_mixture({0.7, 0.1, 0.1, 0.1}).validate());
  EXPECT_THROW(Channel::pauli_mixture({0.7, 0.1, 0.1, 0.2}).validate(), std::invalid_argument);
  Channel bad{{1.0}, {Matrix2::Identity() * 2.0}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  Channel negative{{1.5, -0.5}, {Matrix2::Identity(), Matrix2::Identity()}};
  EXPECT_THROW(negative.validate(), std::invalid_argument);
}

TEST(TaggedPhase, IdentityIsExactlyHalf) {
  Rng rng(1);
  const auto r = tagged_phase_independence(Channel::pauli_mixture({1, 0, 0, 0}), 20000, rng);
  EXPECT_NEAR(r.exact, 0.5, 1e-12);
  EXPECT_NEAR(r.fraction, 0.5, five_sigma(r.trials));
}

TEST(TaggedPhase, DepolarizingIsHalf) {
  Rng rng(2);
  const auto r = tagged_phase_independence(Channel::pauli_mixture({0.25, 0.25, 0.25, 0.25}), 20000, rng);
  EXPECT_NEAR(r.exact, 0.5, 1e-12);
  EXPECT_NEAR(r.fraction, 0.5, five_sigma(r.trials));
}

TEST(TaggedPhase, RandomMixturesStayAtHalf) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Channel c;
    double total = 0;
    for (int k = 0; k < 3; ++k) {
      c.weights.push_back(std::uniform_real_distribution<double>(0.1, 1.0)(rng));
      total += c.weights.back();
      c.ops.push_back(random_unitary(rng));
    }
    for (auto& w : c.weights) w /= total;
    const auto r = tagged_phase_independence(c, 100000, rng);
    EXPECT_NEAR(r.exact, 0.5, 1e-9);
    EXPECT_NEAR(r.fraction, 0.5, five_sigma(r.trials));
  }
}

// The label model must reproduce the same statistic for Z-tagged pairs.
TEST(TaggedPhase, SampledTaggedPairsMatch) {
  Rng rng(4);
  ChannelParams cp;
  cp.delta_p = 0.05;
  cp.tag_fraction = 0.5;
  const auto e = sample_ensemble(cp, 40000, rng);
  std::size_t tagged = 0, flips = 0;
  for (const auto& p : e.pairs())
    if (p.tagged) {
      ++tagged;
      flips += p.b;
    }
  EXPECT_NEAR(flips / double(tagged), 0.5, five_sigma(tagged));
}

TEST(ProtocolCheck, SmallScripts) {
  const std::vector<ScriptRound> z{{Basis::Z, {0, 1}, 1}};
  auto r = exhaustive_protocol_check(2, z);
  EXPECT_EQ(r.cases, 16u);
  EXPECT_TRUE(r.ok());

  const std::vector<ScriptRound> mixed{{Basis::Z, {0, 1, 2}, 2}, {Basis::X, {0, 1}, 0}};
  r = exhaustive_protocol_check(3, mixed);
  EXPECT_EQ(r.cases, 64u);
  EXPECT_TRUE(r.ok());
  EXPECT_LT(r.max_norm_error, 1e-9);

  r = exhaustive_protocol_check(2, {});
  EXPECT_EQ(r.cases, 16u);
  EXPECT_TRUE(r.ok());

  EXPECT_THROW(exhaustive_protocol_check(7, {}), std::invalid_argument);
}

TEST(ProtocolCheck, RandomScripts) {
  Rng rng(5);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto script = random_script(n, n - 1, rng);
    const auto r = exhaustive_protocol_check(n, script);
    EXPECT_EQ(r.cases, std::size_t{1} << (2 * n));
    EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : r.failures.front());
  }
}
