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
#include <optional>
#include <string_view>
#include <vector>

#include "bdsw/bits.hpp"
#include "bdsw/pair_state.hpp"
#include "bdsw/random.hpp"
#include "bdsw/reconcile.hpp"
#include "bdsw/transcript.hpp"

namespace bdsw {

enum class Mode { Entanglement, PrepareMeasure };
enum class EcMethod { Auto, Fixed, Adaptive };
enum class AbortReason { None, NoKey, DecodingFailed };

std::string_view to_string(Mode m);
std::string_view to_string(AbortReason r);

struct SessionConfig {
  std::size_t n_raw = 4096;  // pairs, or sifted bits in prepare-and-measure mode
  ChannelParams channel;
  Mode mode = Mode::Entanglement;
  double test_fraction = 0.5;
  std::size_t ec_slack = 10;
  std::size_t pa_slack = 10;
  std::uint64_t seed = 0;
  bool strict_untagged_discard = false;

  /// Auto: fixed budget up to 64 post-test pairs, block-adaptive beyond.
  EcMethod ec_method = EcMethod::Auto;
  std::size_t max_retries = 3;
  std::size_t verify_rounds = 10;
  /// Use the nominal channel rates instead of the test estimates for budgets.
  bool nominal_rates = false;
  /// Fixed-budget decoding radius; default floor(delta_b N) for exact
  /// sampling and ceil(1.5 delta_b N) for Bernoulli.
  std::optional<std::size_t> ec_radius;
  /// Prepare-and-measure only: Bob always picks the wrong basis.
  bool adversarial_bases = false;
  /// Prepare-and-measure only: transmissions allowed per requested sifted bit.
  std::size_t max_transmissions_per_bit = 8;

  void validate() const;
};

struct Estimates {
  double delta_b = 0.0;
  double delta_p = 0.0;         // untagged X-tested pairs only
  double delta_p_pooled = 0.0;  // every X-tested pair
  std::size_t z_tests = 0;
  std::size_t x_tests = 0;
  std::size_t x_tests_untagged = 0;
};

struct SessionResult {
  BitString key_alice;
  BitString key_bob;
  bool agreed = false;
  Transcript transcript;
  double realized_rate = 0.0;  // |key| / N
  Estimates estimates;
  AbortReason abort_reason = AbortReason::None;

  std::size_t n_post_test = 0;
  std::size_t ec_rounds = 0;
  std::size_t pa_rounds = 0;
  std::size_t pa_phase2_rounds = 0;
  std::size_t ec_retries = 0;
  std::size_t untagged_discards = 0;
  /// The public compression rounds left the key rows dependent once
  /// restricted to untagged columns.
  bool degenerate_randomness = false;
  bool lineage_full_rank = true;
  std::size_t sifted = 0;
  std::size_t transmissions = 0;
};

struct ErrorTestResult {
  Estimates estimates;
  Ensemble ensemble;  // test pairs discarded
  std::vector<std::size_t> tested;
};

/// Measures a uniform subset of floor(fraction * live) pairs: untagged pairs
/// in a public random basis, tagged pairs in their tag basis. Z tests reveal
/// the bit label, X tests the phase label. Outcomes are announced on `log`.
/// Throws std::invalid_argument for an empty test set.
ErrorTestResult error_test(const Ensemble& e, double fraction, Rng& public_rng,
                           std::span<const Bit> alice_values, Rng& x_outcome_rng,
                           Transcript* log = nullptr);

SessionResult run_session(const SessionConfig& cfg);
SessionResult run_prepare_measure(const SessionConfig& cfg);

/// Sets and returns `agreed` from a bitwise key comparison.
bool verify_agreement(SessionResult& r);

}  // namespace bdsw
