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
#include <span>
#include <vector>

#include "bdsw/bits.hpp"
#include "bdsw/random.hpp"
#include "bdsw/transcript.hpp"

namespace bdsw {

/// Alice's key during compression. Positions are compact: a discarded bit
/// disappears and later bits shift down.
///
/// `lineage[i]` is the GF(2) row over the original columns that produces
/// bits[i]; `origin_tags[i]` marks bits that started on a tagged pair.
struct KeyString {
  BitString bits;
  std::vector<bool> origin_tags;
  std::vector<BitVector> lineage;

  /// Identity lineage over `bits`.
  static KeyString from_bits(BitString bits, std::vector<bool> origin_tags = {});

  std::size_t size() const { return bits.size(); }
  std::size_t n_columns() const { return lineage.empty() ? 0 : lineage.front().size(); }
  /// bits == lineage * original.
  bool consistent_with(std::span<const Bit> original) const;
};

/// Replaces each bit of `subset` other than `dest` by its XOR with bit `dest`
/// and drops `dest`. Throws on out-of-range indices, an unsorted or
/// singleton subset, or a destination outside it.
KeyString pa_round_bits(const KeyString& k, std::span<const std::size_t> subset, std::size_t dest);

/// ceil(n H(delta_p)) + slack.
std::size_t pa_rounds_untagged(std::size_t n, double delta_p, std::size_t slack = 0);

struct PaSchedule {
  std::size_t rounds_phase1 = 0;
  std::size_t rounds_phase2 = 0;
  std::size_t n_p = 0;     // ceil(n H(delta_p)) for reference
  double q = 0.0;          // bits left after phase 1, from the rate formula
  std::size_t untagged_discard_target = 0;  // ceil((1 - Delta^2) n H(delta_p / (1 - Delta)))

  std::size_t total() const { return rounds_phase1 + rounds_phase2; }
};

/// Two-stage schedule for a source with tagged fraction `delta`:
/// phase 1 is ceil((1 + Delta) n H(delta_p / (1 - Delta))) + slack rounds,
/// phase 2 is ceil(Delta q) with q = n [1 - H(delta_b) - (1 + Delta) H(delta_p / (1 - Delta))].
/// Throws AbortNoKey when delta_p / (1 - Delta) >= 1/2.
PaSchedule pa_schedule_tagged(std::size_t n, double delta_p, double delta, double delta_b,
                              std::size_t slack = 0);

struct PaOptions {
  /// Extend phase 1 until `untagged_discard_target` discarded bits come
  /// from untagged pairs.
  bool strict_untagged_discard = false;
};

/// Positions of one compression round, drawn from the public stream.
struct PaRound {
  std::vector<std::size_t> subset;  // compact positions, sorted
  std::size_t dest = 0;
  bool dest_tagged = false;
};

struct PaResult {
  KeyString key;
  std::vector<PaRound> rounds;
  std::size_t phase1_rounds = 0;
  std::size_t untagged_discards = 0;
};

/// Draws subset and destination for a key of `live` bits.
PaRound draw_pa_round(std::size_t live, Rng& public_rng);

/// Runs phase 1 then phase 2 with public random rounds. Throws
/// std::length_error when the rounds would leave no key bit.
PaResult run_pa(const KeyString& k, const PaSchedule& schedule, Rng& public_rng,
                const PaOptions& options = {}, Transcript* log = nullptr);

/// True iff the lineage rows restricted to `untagged_columns` are linearly
/// independent.
bool lineage_rank_check(const KeyString& k, std::span<const std::size_t> untagged_columns);

}  // namespace bdsw
