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
#include <stdexcept>

namespace bdsw {

/// Raised when the worst-case phase rate leaves nothing to distill.
class AbortNoKey : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct RateInputs {
  double delta_b = 0.0;
  double delta_p = 0.0;
  double delta = 0.0;  // tagged fraction
  std::optional<std::size_t> n;

  void validate() const;
  /// delta_p / (1 - delta).
  double inflated_phase_rate() const { return delta_p / (1.0 - delta); }
};

/// H(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0.
double binary_entropy(double x);

struct LikelyCountExponents {
  double log2_wb = 0.0;
  double log2_wp = 0.0;
  double log2_wp_untagged = 0.0;
};

/// N H(delta_b), N H(delta_p), (1 - Delta^2) N H(delta_p / (1 - Delta)).
/// Uses N = 1 when `n` is absent (per-pair exponents).
LikelyCountExponents likely_count_exponents(const RateInputs& in);

/// 1 - H(delta_b) - H(delta_p). May be negative.
double key_rate(const RateInputs& in);

struct TaggedRate {
  double rf = 0.0;          // final key fraction
  double q_fraction = 0.0;  // bits left after the first privacy stage, over N
  double l_fraction = 0.0;  // first-stage rounds, over N
  bool negative() const { return rf <= 0.0; }
};

/// Rates for a source with a tagged fraction Delta. Throws AbortNoKey when
/// delta_p / (1 - Delta) >= 1/2.
TaggedRate tagged_key_rate(const RateInputs& in);

}  // namespace bdsw
