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

#include "bdsw/session.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <memory>
#include <unordered_map>

#include "bdsw/hashing.hpp"
#include "bdsw/privacy.hpp"
#include "bdsw/rates.hpp"

namespace bdsw {

std::string_view to_string(Mode m) { return m == Mode::Entanglement ? "ent" : "pm"; }

std::string_view to_string(AbortReason r) {
  switch (r) {
    case AbortReason::None: return "none";
    case AbortReason::NoKey: return "no_key";
    case AbortReason::DecodingFailed: return "decoding_failed";
  }
  return "?";
}

void SessionConfig::validate() const {
  channel.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("SessionConfig: test_fraction must be in (0, 1)");
  const auto t = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n_raw)));
  if (t < 2 || n_raw - t < 2)
    throw std::invalid_argument("SessionConfig: n_raw too small for the test fraction");
  if (max_transmissions_per_bit == 0)
    throw std::invalid_argument("SessionConfig: max_transmissions_per_bit must be positive");
}

ErrorTestResult error_test(const Ensemble& e, double fraction, Rng& public_rng,
                           std::span<const Bit> alice_values, Rng& x_outcome_rng,
                           Transcript* log) {
  const auto live = e.live_indices();
  const auto t = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(live.size())));
  if (t == 0) throw std::invalid_argument("error_test: empty test set");
  if (t < 2) throw std::invalid_argument("error_test: test set needs at least two pairs");

  ErrorTestResult res;
  res.ensemble = e;
  const auto pos = sample_positions(public_rng, live.size(), t);
  BitString mask(live.size(), 0), bases, out_alice, out_bob;
  std::size_t z_err = 0, x_err = 0, x_err_untagged = 0;
  auto& est = res.estimates;
  for (auto p : pos) {
    const std::size_t i = live[p];
    const auto& pair = e[i];
    mask[p] = 1;
    const Basis basis = pair.tagged ? pair.tag_basis : (coin(public_rng) ? Basis::X : Basis::Z);
    bases.push_back(basis == Basis::X);
    Bit alice, bob;
    if (basis == Basis::Z) {
      alice = alice_values[i];
      bob = alice ^ pair.a;
      ++est.z_tests;
      z_err += pair.a;
    } else {
      alice = static_cast<Bit>(coin(x_outcome_rng));
      bob = alice ^ pair.b;
      ++est.x_tests;
      x_err += pair.b;
      if (!pair.tagged) {
        ++est.x_tests_untagged;
        x_err_untagged += pair.b;
      }
    }
    out_alice.push_back(alice);
    out_bob.push_back(bob);
    res.ensemble.discard(i);
    res.tested.push_back(i);
  }
  // A basis nobody tested gives no information; assume the worst.
  auto ratio = [](std::size_t k, std::size_t n) {
    return n == 0 ? 0.5 : static_cast<double>(k) / static_cast<double>(n);
  };
  est.delta_b = ratio(z_err, est.z_tests);
  est.delta_p = ratio(x_err_untagged, est.x_tests_untagged);
  est.delta_p_pooled = ratio(x_err, est.x_tests);
  if (log) {
    log->append(Party::Alice, MessageKind::SubsetAnnounce, std::move(mask));
    log->append(Party::Alice, MessageKind::Basis, std::move(bases));
    log->append(Party::Alice, MessageKind::TestOutcome, std::move(out_alice));
    log->append(Party::Bob, MessageKind::TestOutcome, std::move(out_bob));
  }
  return res;
}

bool verify_agreement(SessionResult& r) {
  r.agreed = r.key_alice == r.key_bob;
  return r.agreed;
}

namespace {

// Pairs plus Alice's Z values; Bob's value is Alice's XOR the bit label.
class PairChannel final : public ParityChannel {
 public:
  PairChannel(Ensemble e, BitString values) : e_(std::move(e)), v_(std::move(values)) {}
  std::vector<std::size_t> live_indices() const override { return e_.live_indices(); }
  ParityRound z_round(std::span<const std::size_t> subset, std::size_t dest) override {
    Bit parity = 0;
    for (auto i : subset) parity ^= v_[i];
    auto out = z_parity_round(e_, subset, dest, parity);
    e_ = std::move(out.ensemble);
    return std::move(out.round);
  }
  void correct_bob(std::size_t i) override { e_[i] = apply_pauli(e_[i], Pauli::X); }

  Ensemble& ensemble() { return e_; }
  const BitString& values() const { return v_; }

 private:
  Ensemble e_;
  BitString v_;
};

// Measured bits on both sides.
class BitChannel final : public ParityChannel {
 public:
  BitChannel(BitString alice, BitString bob, std::vector<bool> alive, std::vector<bool> tags)
      : alice_(std::move(alice)), bob_(std::move(bob)), alive_(std::move(alive)), tags_(std::move(tags)) {}
  std::vector<std::size_t> live_indices() const override {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < alive_.size(); ++i)
      if (alive_[i]) out.push_back(i);
    return out;
  }
  ParityRound z_round(std::span<const std::size_t> subset, std::size_t dest) override {
    if (subset.size() < 2 || !std::binary_search(subset.begin(), subset.end(), dest))
      throw std::invalid_argument("BitChannel: bad round");
    ParityRound r;
    r.basis = Basis::Z;
    r.subset.assign(subset.begin(), subset.end());
    r.dest = dest;
    r.dest_tagged = tags_[dest];
    for (auto i : subset) {
      if (!alive_[i]) throw std::invalid_argument("BitChannel: index refers to a discarded bit");
      r.parity_alice ^= alice_[i];
      r.parity_bob ^= bob_[i];
    }
    alive_[dest] = false;
    return r;
  }
  void correct_bob(std::size_t i) override { bob_[i] ^= 1; }

  const BitString& alice() const { return alice_; }
  const BitString& bob() const { return bob_; }

 private:
  BitString alice_, bob_;
  std::vector<bool> alive_, tags_;
};

SessionResult abort_with(SessionResult r, AbortReason reason) {
  r.abort_reason = reason;
  r.key_alice.clear();
  r.key_bob.clear();
  r.realized_rate = 0.0;
  verify_agreement(r);
  return r;
}

SessionResult run(const SessionConfig& cfg, Mode mode) {
  cfg.validate();
  SessionResult res;
  Rng channel_rng = make_stream(cfg.seed, "channel");
  Rng values_rng = make_stream(cfg.seed, "values");
  Rng x_rng = make_stream(cfg.seed, "xvalues");
  Rng public_rng = make_stream(cfg.seed, "public");
  Rng bases_rng = make_stream(cfg.seed, "bases");
  Transcript* log = &res.transcript;

  std::size_t n = cfg.n_raw;
  if (mode == Mode::PrepareMeasure) {
    const std::size_t cap = cfg.max_transmissions_per_bit * cfg.n_raw;
    BitString bob_bases, matches;
    while (res.sifted < cfg.n_raw && res.transmissions < cap) {
      const bool alice_x = coin(bases_rng);
      const bool bob_x = cfg.adversarial_bases ? !alice_x : coin(bases_rng);
      ++res.transmissions;
      bob_bases.push_back(bob_x);
      matches.push_back(alice_x == bob_x);
      if (alice_x == bob_x) ++res.sifted;
      else coin(bases_rng);  // value of a transmission that is sifted away
    }
    log->append(Party::Bob, MessageKind::Basis, std::move(bob_bases));
    log->append(Party::Alice, MessageKind::Basis, std::move(matches));
    n = res.sifted;
    const auto t = static_cast<std::size_t>(std::floor(cfg.test_fraction * static_cast<double>(n)));
    if (t < 2 || n - t < 2) return abort_with(std::move(res), AbortReason::NoKey);
  }

  const Ensemble raw = sample_ensemble(cfg.channel, n, channel_rng);
  BitString values(n);
  for (auto& v : values) v = static_cast<Bit>(coin(values_rng));

  auto test = error_test(raw, cfg.test_fraction, public_rng, values, x_rng, log);
  res.estimates = test.estimates;
  const auto columns = test.ensemble.live_indices();
  const std::size_t big_n = columns.size();
  res.n_post_test = big_n;

  const double d_b = cfg.nominal_rates ? cfg.channel.delta_b : res.estimates.delta_b;
  const double d_p = cfg.nominal_rates ? cfg.channel.delta_p : res.estimates.delta_p;
  const double tag = cfg.channel.tag_fraction;
  if (d_b >= 0.5 || d_p >= 0.5 || d_p / (1.0 - tag) >= 0.5)
    return abort_with(std::move(res), AbortReason::NoKey);
  const RateInputs in{d_b, d_p, tag, big_n};
  const double formula = tag > 0.0 ? tagged_key_rate(in).rf : key_rate(in);
  if (formula <= 0.0) return abort_with(std::move(res), AbortReason::NoKey);

  // Reconciliation.
  std::unique_ptr<ParityChannel> channel;
  PairChannel* pairs = nullptr;
  BitChannel* bits = nullptr;
  if (mode == Mode::Entanglement) {
    auto p = std::make_unique<PairChannel>(test.ensemble, values);
    pairs = p.get();
    channel = std::move(p);
  } else {
    BitString bob(n);
    std::vector<bool> alive(n, false), tags(n);
    for (std::size_t i = 0; i < n; ++i) {
      bob[i] = values[i] ^ raw[i].a;
      tags[i] = raw[i].tagged;
    }
    for (auto c : columns) alive[c] = true;
    auto b = std::make_unique<BitChannel>(values, std::move(bob), std::move(alive), std::move(tags));
    bits = b.get();
    channel = std::move(b);
  }

  const bool fixed = cfg.ec_method == EcMethod::Fixed ||
                     (cfg.ec_method == EcMethod::Auto && big_n <= 64);
  EcReport report;
  if (fixed) {
    FixedEcOptions o;
    o.rounds = ec_round_budget(big_n, d_b, cfg.ec_slack);
    o.retry_rounds = std::max<std::size_t>(1, cfg.ec_slack);
    o.max_retries = cfg.max_retries;
    o.verify_rounds = cfg.verify_rounds;
    const double nb = d_b * static_cast<double>(big_n);
    o.radius = cfg.ec_radius ? *cfg.ec_radius
               : cfg.channel.sampling == Sampling::ExactCount
                   ? static_cast<std::size_t>(std::floor(nb + 1e-9))
                   : static_cast<std::size_t>(std::ceil(1.5 * nb - 1e-9));
    auto r = run_ec_fixed(*channel, public_rng, o, log);
    report = r.report;
    res.ec_retries = r.retries;
  } else {
    AdaptiveEcOptions o;
    o.verify_rounds = cfg.verify_rounds;
    o.max_retries = cfg.max_retries;
    o.prior_delta = std::clamp(d_b, 0.002, 0.45);
    auto r = run_ec_adaptive(*channel, public_rng, o, log);
    report = r.report;
    res.ec_retries = r.retries;
  }
  res.ec_rounds = report.rounds_used;
  if (report.decode_status != DecodeStatus::Unique)
    return abort_with(std::move(res), AbortReason::DecodingFailed);

  // Keys as they stand after reconciliation, with lineage over the post-test columns.
  const auto survivors = channel->live_indices();
  std::unordered_map<std::size_t, std::size_t> col_of;
  for (std::size_t j = 0; j < big_n; ++j) col_of[columns[j]] = j;
  KeyString alice;
  BitString bob_bits;
  for (auto s : survivors) {
    alice.bits.push_back(values[s]);
    alice.origin_tags.push_back(raw[s].tagged);
    BitVector row(big_n);
    row.set(col_of.at(s), true);
    alice.lineage.push_back(std::move(row));
    bob_bits.push_back(pairs ? static_cast<Bit>(values[s] ^ pairs->ensemble()[s].a) : bits->bob()[s]);
  }

  // Privacy amplification.
  PaSchedule schedule;
  try {
    schedule = pa_schedule_tagged(big_n, d_p, tag, d_b, cfg.pa_slack);
  } catch (const AbortNoKey&) {
    return abort_with(std::move(res), AbortReason::NoKey);
  }
  if (schedule.total() >= alice.size()) return abort_with(std::move(res), AbortReason::NoKey);
  PaResult pa;
  try {
    pa = run_pa(alice, schedule, public_rng, {cfg.strict_untagged_discard},
                mode == Mode::PrepareMeasure ? log : nullptr);
  } catch (const std::length_error&) {
    return abort_with(std::move(res), AbortReason::NoKey);
  }
  res.pa_rounds = pa.rounds.size();
  res.pa_phase2_rounds = pa.rounds.size() - pa.phase1_rounds;
  res.untagged_discards = pa.untagged_discards;

  if (pairs) {
    // Same rounds on the pairs: X-basis parity collection, destination measured in X.
    Ensemble e = pairs->ensemble();
    for (const auto& r : pa.rounds) {
      const auto live = e.live_indices();
      std::vector<std::size_t> subset;
      for (auto p : r.subset) subset.push_back(live[p]);
      auto out = x_parity_round(e, subset, live[r.dest], static_cast<Bit>(coin(x_rng)));
      BitString payload(2 * live.size(), 0);
      for (auto p : r.subset) payload[p] = 1;
      payload[live.size() + r.dest] = 1;
      log->append(Party::Alice, MessageKind::SubsetAnnounce, std::move(payload));
      log->append(Party::Alice, MessageKind::Parity, {out.round.parity_alice});
      log->append(Party::Bob, MessageKind::Parity, {out.round.parity_bob});
      e = std::move(out.ensemble);
    }
    const auto live = e.live_indices();
    res.key_alice = pa.key.bits;
    for (std::size_t k = 0; k < live.size(); ++k)
      res.key_bob.push_back(pa.key.bits[k] ^ e[live[k]].a);
  } else {
    KeyString bob = alice;
    bob.bits = std::move(bob_bits);
    for (const auto& r : pa.rounds) bob = pa_round_bits(bob, r.subset, r.dest);
    res.key_alice = pa.key.bits;
    res.key_bob = std::move(bob.bits);
  }

  std::vector<std::size_t> untagged;
  for (std::size_t j = 0; j < big_n; ++j)
    if (!raw[columns[j]].tagged) untagged.push_back(j);
  res.lineage_full_rank = lineage_rank_check(pa.key, untagged);
  res.degenerate_randomness = !res.lineage_full_rank;
  res.realized_rate = static_cast<double>(res.key_alice.size()) / static_cast<double>(big_n);
  verify_agreement(res);
  return res;
}

}  // namespace

SessionResult run_session(const SessionConfig& cfg) { return run(cfg, cfg.mode); }

SessionResult run_prepare_measure(const SessionConfig& cfg) {
  if (cfg.mode != Mode::PrepareMeasure)
    throw std::invalid_argument("run_prepare_measure: config mode must be PrepareMeasure");
  return run(cfg, Mode::PrepareMeasure);
}

}  // namespace bdsw
