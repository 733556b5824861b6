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
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "bdsw/bits.hpp"
#include "bdsw/pair_state.hpp"
#include "bdsw/random.hpp"

namespace bdsw {

/// Bilateral CNOT, second pair as target:
/// (a,b),(a',b') -> (a, b^b'),(a'^a, b'). Tags are untouched.
std::pair<PairState, PairState> bicnot(PairState control, PairState target);

/// One hashing step. Indices are stable ensemble indices.
struct ParityRound {
  Basis basis = Basis::Z;
  std::vector<std::size_t> subset;  // sorted, contains dest
  std::size_t dest = 0;
  bool dest_tagged = false;
  Bit parity_alice = 0;
  Bit parity_bob = 0;

  Bit syndrome() const { return parity_alice ^ parity_bob; }
};

struct RoundOutcome {
  ParityRound round;
  Ensemble ensemble;
};

/// Collects the Z parity of `subset` onto `dest` with bi-CNOTs, measures the
/// destination in Z on both sides, and discards it. Alice's outcome on the
/// destination is drawn from `rng`; Bob's differs by r.s_b.
RoundOutcome z_parity_round(const Ensemble& e, std::span<const std::size_t> subset,
                            std::size_t dest, Rng& rng);
/// As above with Alice's destination outcome supplied by the caller.
RoundOutcome z_parity_round(const Ensemble& e, std::span<const std::size_t> subset,
                            std::size_t dest, Bit alice_outcome);

/// X-basis dual: reveals r.s_p and pushes d's bit label onto the controls.
RoundOutcome x_parity_round(const Ensemble& e, std::span<const std::size_t> subset,
                            std::size_t dest, Rng& rng);
RoundOutcome x_parity_round(const Ensemble& e, std::span<const std::size_t> subset,
                            std::size_t dest, Bit alice_outcome);

/// Subset over the live pairs of `e` (at least two members) with a uniformly
/// chosen destination, drawn from the public stream.
std::pair<std::vector<std::size_t>, std::size_t> draw_round(const Ensemble& e, Rng& rng);

enum class CandidateKind { Bit, Phase };

/// Candidate error strings over a tracked set of stable indices.
/// When `enumerated` is false only `log2_count` is meaningful.
struct CandidateSet {
  CandidateKind kind = CandidateKind::Phase;
  std::vector<std::size_t> indices;  // tracked stable indices, sorted
  std::set<BitString> members;
  double log2_count = 0.0;
  bool enumerated = true;

  std::size_t size() const { return members.size(); }
  bool contains_restriction(const Ensemble& e) const;

  /// All strings of weight <= radius over `indices`.
  static CandidateSet hamming_ball(CandidateKind kind, std::vector<std::size_t> indices,
                                   std::size_t radius);
  /// All strings of exactly `weight` ones over `indices`.
  static CandidateSet exact_weight(CandidateKind kind, std::vector<std::size_t> indices,
                                   std::size_t weight);
  /// Bookkeeping-only set with a known log2 cardinality.
  static CandidateSet analytic(CandidateKind kind, std::vector<std::size_t> indices,
                               double log2_count);
};

/// Candidate strings after `round`. Conjugate rounds (phase candidates under
/// Z rounds, bit candidates under X rounds) apply the backward action implied
/// by each candidate's own destination value; an untracked destination with
/// no known value branches over both. Same-basis rounds filter by the
/// announced parity. The destination coordinate is then projected out.
CandidateSet candidate_update(const CandidateSet& c, const ParityRound& round,
                              std::optional<Bit> dest_state_known = std::nullopt);

}  // namespace bdsw
