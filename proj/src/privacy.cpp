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

#include "bdsw/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bdsw/rates.hpp"

namespace bdsw {

KeyString KeyString::from_bits(BitString bits, std::vector<bool> origin_tags) {
  if (origin_tags.empty()) origin_tags.assign(bits.size(), false);
  if (origin_tags.size() != bits.size())
    throw std::invalid_argument("KeyString: tag count does not match bit count");
  KeyString k;
  k.lineage.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    BitVector row(bits.size());
    row.set(i, true);
    k.lineage.push_back(std::move(row));
  }
  k.bits = std::move(bits);
  k.origin_tags = std::move(origin_tags);
  return k;
}

bool KeyString::consistent_with(std::span<const Bit> original) const {
  const auto v = BitVector::from_bits(original);
  if (v.size() != n_columns() && !lineage.empty()) return false;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (static_cast<Bit>(lineage[i].dot(v)) != bits[i]) return false;
  return true;
}

KeyString pa_round_bits(const KeyString& k, std::span<const std::size_t> subset, std::size_t dest) {
  if (subset.size() < 2) throw std::invalid_argument("pa_round_bits: subset needs at least two bits");
  if (!std::is_sorted(subset.begin(), subset.end()) ||
      std::adjacent_find(subset.begin(), subset.end()) != subset.end())
    throw std::invalid_argument("pa_round_bits: subset must be sorted and distinct");
  if (subset.back() >= k.size()) throw std::invalid_argument("pa_round_bits: index refers to a discarded bit");
  if (!std::binary_search(subset.begin(), subset.end(), dest))
    throw std::invalid_argument("pa_round_bits: destination not in subset");

  KeyString out = k;
  for (auto i : subset) {
    if (i == dest) continue;
    out.bits[i] ^= k.bits[dest];
    out.lineage[i] ^= k.lineage[dest];
  }
  const auto at = static_cast<std::ptrdiff_t>(dest);
  out.bits.erase(out.bits.begin() + at);
  out.origin_tags.erase(out.origin_tags.begin() + at);
  out.lineage.erase(out.lineage.begin() + at);
  return out;
}

std::size_t pa_rounds_untagged(std::size_t n, double delta_p, std::size_t slack) {
  if (!(delta_p >= 0.0 && delta_p < 0.5))
    throw std::domain_error("pa_rounds_untagged: delta_p must be in [0, 1/2)");
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * binary_entropy(delta_p) - 1e-9)) +
         slack;
}

PaSchedule pa_schedule_tagged(std::size_t n, double delta_p, double delta, double delta_b,
                              std::size_t slack) {
  RateInputs in{delta_b, delta_p, delta, n};
  const auto exps = likely_count_exponents(in);  // throws AbortNoKey when inflated >= 1/2
  const double nn = static_cast<double>(n);
  const double hp = binary_entropy(in.inflated_phase_rate());
  auto up = [](double x) { return static_cast<std::size_t>(std::max(0.0, std::ceil(x - 1e-9))); };
  PaSchedule s;
  s.rounds_phase1 = up((1.0 + delta) * nn * hp) + slack;
  s.q = nn * (1.0 - binary_entropy(delta_b) - (1.0 + delta) * hp);
  s.rounds_phase2 = delta > 0.0 ? up(delta * s.q) : 0;
  s.n_p = pa_rounds_untagged(n, delta_p);
  s.untagged_discard_target = up(exps.log2_wp_untagged);
  return s;
}

PaRound draw_pa_round(std::size_t live, Rng& public_rng) {
  PaRound r;
  r.subset = random_subset(public_rng, live);
  r.dest = r.subset[uniform_index(public_rng, r.subset.size())];
  return r;
}

namespace {

void log_pa_round(Transcript* log, std::size_t live, const PaRound& r) {
  if (!log) return;
  BitString payload(2 * live, 0);
  for (auto p : r.subset) payload[p] = 1;
  payload[live + r.dest] = 1;
  log->append(Party::Alice, MessageKind::SubsetAnnounce, std::move(payload));
}

}  // namespace

PaResult run_pa(const KeyString& k, const PaSchedule& schedule, Rng& public_rng,
                const PaOptions& options, Transcript* log) {
  PaResult res;
  res.key = k;
  auto step = [&] {
    if (res.key.size() <= 1) throw std::length_error("run_pa: key exhausted");
    auto r = draw_pa_round(res.key.size(), public_rng);
    r.dest_tagged = res.key.origin_tags[r.dest];
    log_pa_round(log, res.key.size(), r);
    res.key = pa_round_bits(res.key, r.subset, r.dest);
    if (!r.dest_tagged) ++res.untagged_discards;
    res.rounds.push_back(std::move(r));
  };
  if (schedule.total() >= k.size()) throw std::length_error("run_pa: key exhausted");
  for (std::size_t i = 0; i < schedule.rounds_phase1; ++i) step();
  if (options.strict_untagged_discard)
    while (res.untagged_discards < schedule.untagged_discard_target) step();
  res.phase1_rounds = res.rounds.size();
  for (std::size_t i = 0; i < schedule.rounds_phase2; ++i) step();
  return res;
}

bool lineage_rank_check(const KeyString& k, std::span<const std::size_t> untagged_columns) {
  std::vector<BitVector> rows;
  rows.reserve(k.size());
  for (const auto& l : k.lineage) {
    BitVector r(untagged_columns.size());
    for (std::size_t j = 0; j < untagged_columns.size(); ++j) r.set(j, l.get(untagged_columns[j]));
    rows.push_back(std::move(r));
  }
  return gf2_rank(std::move(rows)) == k.size();
}

}  // namespace bdsw
