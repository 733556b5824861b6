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

#include "bdsw/rates.hpp"

#include <cmath>

namespace bdsw {

void RateInputs::validate() const {
  auto rate_ok = [](double x) { return std::isfinite(x) && x >= 0.0 && x < 0.5; };
  if (!rate_ok(delta_b)) throw std::domain_error("RateInputs: delta_b must be in [0, 1/2)");
  if (!rate_ok(delta_p)) throw std::domain_error("RateInputs: delta_p must be in [0, 1/2)");
  if (!std::isfinite(delta) || delta < 0.0 || delta >= 1.0)
    throw std::domain_error("RateInputs: tag fraction must be in [0, 1)");
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: x must be in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

LikelyCountExponents likely_count_exponents(const RateInputs& in) {
  in.validate();
  const double n = in.n ? static_cast<double>(*in.n) : 1.0;
  const double inflated = in.inflated_phase_rate();
  if (inflated >= 0.5) throw AbortNoKey("likely_count_exponents: inflated phase rate >= 1/2");
  LikelyCountExponents out;
  out.log2_wb = n * binary_entropy(in.delta_b);
  out.log2_wp = n * binary_entropy(in.delta_p);
  out.log2_wp_untagged = (1.0 - in.delta * in.delta) * n * binary_entropy(inflated);
  return out;
}

double key_rate(const RateInputs& in) {
  in.validate();
  return 1.0 - binary_entropy(in.delta_b) - binary_entropy(in.delta_p);
}

TaggedRate tagged_key_rate(const RateInputs& in) {
  in.validate();
  const double inflated = in.inflated_phase_rate();
  if (inflated >= 0.5) throw AbortNoKey("tagged_key_rate: inflated phase rate >= 1/2");
  const double d = in.delta;
  const double hb = binary_entropy(in.delta_b);
  const double hp = binary_entropy(inflated);
  TaggedRate r;
  r.rf = 1.0 - d - (1.0 - d) * hb - hp + d * d * hp;
  r.q_fraction = 1.0 - hb - hp - d * hp;
  r.l_fraction = (1.0 + d) * hp;
  return r;
}

}  // namespace bdsw
