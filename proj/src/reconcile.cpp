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

#include "bdsw/reconcile.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bdsw/rates.hpp"

namespace bdsw {

std::string ParityMatrix::serialize() const {
  std::string out = std::to_string(rows.size()) + " " + std::to_string(n_cols) + "\n";
  for (const auto& r : rows) {
    out += r.to_hex();
    out += '\n';
  }
  return out;
}

ParityMatrix ParityMatrix::parse(std::string_view text, MatrixKind kind) {
  std::istringstream in{std::string(text)};
  std::size_t n_rows = 0, n_cols = 0;
  if (!(in >> n_rows >> n_cols)) throw std::invalid_argument("ParityMatrix: bad header");
  ParityMatrix m;
  m.n_cols = n_cols;
  m.kind = kind;
  for (std::size_t i = 0; i < n_rows; ++i) {
    std::string hex;
    if (!(in >> hex)) throw std::invalid_argument("ParityMatrix: missing row");
    m.rows.push_back(BitVector::from_hex(hex, n_cols));
  }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("ParityMatrix: trailing data");
  return m;
}

ParityMatrix random_parity_matrix(std::size_t n, std::size_t n_rows, Rng& rng) {
  if (n_rows + 1 > n && n_rows > 0)
    throw std::invalid_argument("random_parity_matrix: more rounds than the pairs allow");
  ParityMatrix m;
  m.n_cols = n;
  m.kind = MatrixKind::Random;
  for (std::size_t i = 0; i < n_rows; ++i) {
    const auto pos = random_subset(rng, n - i);
    m.rows.push_back(BitVector::from_indices(n, pos));
  }
  return m;
}

std::size_t ec_round_budget(std::size_t n, double delta_b, std::size_t slack) {
  if (!(delta_b >= 0.0 && delta_b < 0.5))
    throw std::domain_error("ec_round_budget: delta_b must be in [0, 1/2)");
  const double v = static_cast<double>(n) * binary_entropy(delta_b);
  return static_cast<std::size_t>(std::ceil(v - 1e-9)) + slack;
}

std::string_view to_string(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::Unique: return "unique";
    case DecodeStatus::Ambiguous: return "ambiguous";
    case DecodeStatus::OutOfRadius: return "out_of_radius";
  }
  return "?";
}

double log2_ball_volume(std::size_t n, std::size_t w) {
  w = std::min(w, n);
  // Sum in log space relative to the largest term.
  std::vector<double> terms;
  for (std::size_t j = 0; j <= w; ++j)
    terms.push_back((std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0)) /
                    std::log(2.0));
  const double mx = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp2(t - mx);
  return mx + std::log2(s);
}

namespace {

// Column syndromes: bit r of column j is rows[r][j].
std::vector<BitVector> column_syndromes(const ParityMatrix& m) {
  std::vector<BitVector> cols(m.n_cols, BitVector(m.rows.size()));
  for (std::size_t r = 0; r < m.rows.size(); ++r)
    for (auto j : m.rows[r].ones()) cols[j].set(r, true);
  return cols;
}

}  // namespace

std::vector<BitString> decode_exhaustive(std::span<const Bit> parities, const ParityMatrix& matrix,
                                         std::size_t radius, std::size_t budget) {
  if (parities.size() != matrix.n_rows())
    throw std::invalid_argument("decode_exhaustive: parity count does not match rows");
  const std::size_t n = matrix.n_cols;
  if (std::exp2(log2_ball_volume(n, radius)) > static_cast<double>(budget))
    throw DecodeError("decode_exhaustive: Hamming ball exceeds enumeration budget");

  const auto cols = column_syndromes(matrix);
  const auto target = BitVector::from_bits(parities);
  std::vector<BitString> out;
  std::vector<std::size_t> chosen;
  BitVector acc(matrix.n_rows());

  auto emit = [&] {
    BitString s(n, 0);
    for (auto j : chosen) s[j] = 1;
    out.push_back(std::move(s));
  };
  // Depth-first over increasing column indices.
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (acc == target) emit();
    if (chosen.size() == radius) return;
    for (std::size_t j = start; j < n; ++j) {
      acc ^= cols[j];
      chosen.push_back(j);
      self(self, j + 1);
      chosen.pop_back();
      acc ^= cols[j];
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

MinWeightResult min_weight_solutions(const std::vector<BitVector>& rows, const BitVector& rhs,
                                     std::size_t n_cols, std::size_t max_weight,
                                     std::size_t keep, std::size_t budget) {
  MinWeightResult res;
  const auto sol = gf2_solve(rows, rhs, n_cols);
  res.rank = sol.rank;
  if (!sol.consistent) return res;
  res.consistent = true;

  std::size_t best = max_weight + 1;
  std::size_t visited = 0;
  const auto& kernel = sol.kernel;
  std::vector<BitVector> stack(std::min(kernel.size(), max_weight) + 1, BitVector(n_cols));
  stack[0] = sol.particular;

  auto consider = [&](const BitVector& x) {
    const std::size_t w = x.popcount();
    if (w < best) {
      best = w;
      res.solutions.clear();
    }
    if (w == best && res.solutions.size() < keep) res.solutions.push_back(x);
  };

  // Solutions with p free-variable ones weigh at least p, so p stops at best.
  auto rec = [&](auto&& self, std::size_t depth, std::size_t start, std::size_t p) -> void {
    if (res.budget_exhausted) return;
    if (depth == p) {
      consider(stack[depth]);
      return;
    }
    for (std::size_t k = start; k + (p - depth) <= kernel.size(); ++k) {
      if (++visited > budget) {
        res.budget_exhausted = true;
        return;
      }
      stack[depth + 1] = stack[depth];
      stack[depth + 1] ^= kernel[k];
      self(self, depth + 1, k + 1, p);
    }
  };
  for (std::size_t p = 0; p <= std::min(kernel.size(), max_weight) && p <= best; ++p) {
    rec(rec, 0, 0, p);
    if (res.budget_exhausted) break;
  }
  if (best <= max_weight) res.min_weight = best;
  return res;
}

BitString decode_gaussian(std::span<const Bit> parities, const ParityMatrix& matrix,
                          std::size_t max_weight) {
  if (parities.size() != matrix.n_rows())
    throw std::invalid_argument("decode_gaussian: parity count does not match rows");
  const auto r = min_weight_solutions(matrix.rows, BitVector::from_bits(parities), matrix.n_cols,
                                      max_weight, 1);
  if (!r.consistent) throw DecodeError("decode_gaussian: parities are inconsistent (rank-deficient system)");
  if (!r.min_weight) throw DecodeError("decode_gaussian: no solution within the weight bound");
  return r.solutions.front().to_bits();
}

ParityRound EnsembleChannel::z_round(std::span<const std::size_t> subset, std::size_t dest) {
  auto out = z_parity_round(e_, subset, dest, *rng_);
  e_ = std::move(out.ensemble);
  return std::move(out.round);
}

namespace {

void log_round(Transcript* log, const std::vector<std::size_t>& live,
               const ParityRound& r) {
  if (!log) return;
  BitString payload(2 * live.size(), 0);
  for (std::size_t p = 0, s = 0; p < live.size() && s < r.subset.size(); ++p) {
    if (live[p] == r.subset[s]) {
      payload[p] = 1;
      if (live[p] == r.dest) payload[live.size() + p] = 1;
      ++s;
    }
  }
  log->append(Party::Alice, MessageKind::SubsetAnnounce, std::move(payload));
  log->append(Party::Alice, MessageKind::Parity, {r.parity_alice});
  log->append(Party::Bob, MessageKind::Parity, {r.parity_bob});
}

BitVector compact_mask(const std::vector<std::size_t>& live, std::span<const std::size_t> subset,
                       std::size_t width) {
  BitVector m(width);
  for (std::size_t p = 0, s = 0; p < live.size() && s < subset.size(); ++p)
    if (live[p] == subset[s]) {
      m.set(p, true);
      ++s;
    }
  return m;
}

}  // namespace

EcResult run_ec(ParityChannel& channel, const ParityMatrix& schedule, Rng& public_rng,
                const EcOptions& options, Transcript* log) {
  EcResult res;
  res.columns = channel.live_indices();
  const std::size_t n = res.columns.size();
  if (schedule.n_cols != n)
    throw std::invalid_argument("run_ec: schedule width does not match the live pair count");
  std::unordered_map<std::size_t, std::size_t> col_of;
  for (std::size_t j = 0; j < n; ++j) col_of[res.columns[j]] = j;

  res.linearized.n_cols = n;
  res.linearized.kind = schedule.kind;
  BitString syndromes;
  for (std::size_t i = 0; i < schedule.n_rows(); ++i) {
    const auto live = channel.live_indices();
    const auto ones = schedule.rows[i].ones();
    if (ones.size() < 2) throw std::invalid_argument("run_ec: schedule row with fewer than two pairs");
    if (ones.back() >= live.size())
      throw std::invalid_argument("run_ec: schedule row addresses a discarded position");
    std::vector<std::size_t> subset;
    for (auto p : ones) subset.push_back(live[p]);
    const std::size_t dest = subset[uniform_index(public_rng, subset.size())];
    auto round = channel.z_round(subset, dest);
    log_round(log, live, round);

    BitVector row(n);
    for (auto s : subset) row.set(col_of.at(s), true);
    res.linearized.rows.push_back(std::move(row));
    syndromes.push_back(round.syndrome());
    res.transcript.push_back(std::move(round));
  }
  res.report.rounds_used = schedule.n_rows();

  const bool exhaustive = options.decoder == Decoder::Exhaustive ||
                          (options.decoder == Decoder::Auto && n <= 24);
  std::optional<BitString> estimate;
  if (exhaustive) {
    const auto cands = decode_exhaustive(syndromes, res.linearized, options.radius);
    if (cands.empty()) res.report.decode_status = DecodeStatus::OutOfRadius;
    else if (cands.size() > 1) res.report.decode_status = DecodeStatus::Ambiguous;
    else estimate = cands.front();
  } else {
    const auto r = min_weight_solutions(res.linearized.rows, BitVector::from_bits(syndromes), n,
                                        options.radius, 2);
    if (!r.consistent || !r.min_weight) res.report.decode_status = DecodeStatus::OutOfRadius;
    else if (r.solutions.size() > 1 || r.budget_exhausted) res.report.decode_status = DecodeStatus::Ambiguous;
    else estimate = r.solutions.front().to_bits();
  }
  if (estimate) {
    res.report.decode_status = DecodeStatus::Unique;
    const auto live = channel.live_indices();
    for (auto s : live) {
      if ((*estimate)[col_of.at(s)]) {
        channel.correct_bob(s);
        res.report.corrected_positions.push_back(s);
      }
    }
  }
  return res;
}

EnsembleEcResult run_ec(const Ensemble& e, const ParityMatrix& schedule, Rng& rng,
                        const EcOptions& options) {
  EnsembleChannel ch(e, rng);
  auto ec = run_ec(ch, schedule, rng, options);
  const auto [sb, sp] = ch.ensemble().strings();
  ec.report.residual_bit_errors = hamming_weight(sb);
  return {ch.ensemble(), std::move(ec)};
}

namespace {

constexpr std::size_t kCandidateLimit = 64;

// Linear system over at most 64 columns, one machine word per row.
class SmallSystem {
 public:
  explicit SmallSystem(std::size_t n) : n_(n) {}
  void add_row(std::uint64_t mask, Bit rhs) {
    rows_.push_back(mask);
    rhs_.push_back(rhs);
  }
  std::size_t n_rows() const { return rows_.size(); }
  std::size_t rank() const { return rank_; }

  // All solutions of weight <= w_max, up to `limit` of them. Returns false
  // when the search budget ran out or the limit was hit.
  bool enumerate(std::size_t w_max, std::size_t limit, std::size_t budget,
                 std::vector<std::uint64_t>& out) {
    out.clear();
    std::vector<std::uint64_t> m = rows_;
    std::vector<Bit> b = rhs_;
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n_ && rank < m.size(); ++col) {
      const std::uint64_t bit = std::uint64_t{1} << col;
      std::size_t piv = rank;
      while (piv < m.size() && !(m[piv] & bit)) ++piv;
      if (piv == m.size()) continue;
      std::swap(m[rank], m[piv]);
      std::swap(b[rank], b[piv]);
      for (std::size_t r = 0; r < m.size(); ++r)
        if (r != rank && (m[r] & bit)) {
          m[r] ^= m[rank];
          b[r] ^= b[rank];
        }
      pivots.push_back(col);
      ++rank;
    }
    rank_ = rank;
    for (std::size_t r = rank; r < m.size(); ++r)
      if (b[r]) return true;  // inconsistent: no solutions at all

    std::uint64_t x0 = 0;
    for (std::size_t r = 0; r < rank; ++r)
      if (b[r]) x0 |= std::uint64_t{1} << pivots[r];
    std::uint64_t pivot_mask = 0;
    for (auto p : pivots) pivot_mask |= std::uint64_t{1} << p;
    std::vector<std::uint64_t> kernel;
    for (std::size_t f = 0; f < n_; ++f) {
      if (pivot_mask >> f & 1u) continue;
      std::uint64_t k = std::uint64_t{1} << f;
      for (std::size_t r = 0; r < rank; ++r)
        if (m[r] >> f & 1u) k |= std::uint64_t{1} << pivots[r];
      kernel.push_back(k);
    }

    std::size_t visited = 0;
    bool ok = true;
    auto rec = [&](auto&& self, std::uint64_t x, std::size_t start, std::size_t depth) -> void {
      if (!ok) return;
      if (static_cast<std::size_t>(std::popcount(x)) <= w_max) {
        if (out.size() == limit) {
          ok = false;
          return;
        }
        out.push_back(x);
      }
      if (depth == w_max) return;
      for (std::size_t k = start; k < kernel.size(); ++k) {
        if (++visited > budget) {
          ok = false;
          return;
        }
        self(self, x ^ kernel[k], k + 1, depth + 1);
      }
    };
    rec(rec, x0, 0, 0);
    return ok;
  }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> rows_;
  std::vector<Bit> rhs_;
  std::size_t rank_ = 0;
};

struct Block {
  std::vector<std::size_t> cols;  // stable indices
  std::vector<bool> live;
  SmallSystem system{0};
  std::vector<double> log2_volume;  // by weight
  // Every solution of weight <= cached_w when `complete`.
  std::vector<std::uint64_t> cands;
  std::ptrdiff_t cached_w = -1;
  bool complete = false;
  std::uint64_t estimate = 0;
  bool done = false;
  bool stuck = false;

  std::size_t live_count() const {
    return static_cast<std::size_t>(std::count(live.begin(), live.end(), true));
  }
};

class AdaptiveRunner {
 public:
  AdaptiveRunner(ParityChannel& ch, Rng& rng, const AdaptiveEcOptions& opt, Transcript* log)
      : ch_(ch), rng_(rng), opt_(opt), log_(log) {
    if (opt_.block_size < 2 || opt_.block_size > 64)
      throw std::invalid_argument("run_ec_adaptive: block_size must be in [2, 64]");
    if (!(opt_.prior_delta > 0.0 && opt_.prior_delta < 0.5))
      throw std::invalid_argument("run_ec_adaptive: prior_delta must be in (0, 1/2)");
  }

  AdaptiveEcResult run() {
    const auto start = ch_.live_indices();
    n_start_ = start.size();
    res_.schedule.n_cols = n_start_;
    res_.schedule.kind = MatrixKind::Structured;
    if (n_start_ < 2) throw std::invalid_argument("run_ec_adaptive: need at least two live pairs");

    // Public permutation, then near-equal blocks.
    std::vector<std::size_t> perm = start;
    std::shuffle(perm.begin(), perm.end(), rng_);
    const std::size_t k = std::max<std::size_t>(
        {std::size_t{1}, (n_start_ + 63) / 64,
         static_cast<std::size_t>(std::llround(static_cast<double>(n_start_) /
                                               static_cast<double>(opt_.block_size)))});
    std::size_t offset = 0;
    for (std::size_t b = 0; b < k; ++b) {
      const std::size_t len = n_start_ / k + (b < n_start_ % k ? 1 : 0);
      Block blk;
      blk.cols.assign(perm.begin() + static_cast<std::ptrdiff_t>(offset),
                      perm.begin() + static_cast<std::ptrdiff_t>(offset + len));
      std::sort(blk.cols.begin(), blk.cols.end());
      blk.live.assign(len, true);
      blk.system = SmallSystem(len);
      for (std::size_t w = 0; w <= len; ++w) blk.log2_volume.push_back(log2_ball_volume(len, w));
      for (std::size_t j = 0; j < len; ++j) block_of_[blk.cols[j]] = {b, j};
      blocks_.push_back(std::move(blk));
      offset += len;
    }

    std::size_t confirm = opt_.confirm_bits;
    for (std::size_t attempt = 0;; ++attempt) {
      bool stuck = false;
      for (auto& blk : blocks_) {
        advance(blk, confirm);
        stuck |= blk.stuck;
      }
      if (stuck) {
        finish(DecodeStatus::OutOfRadius, false);
        break;
      }
      const bool ok = verify();
      if (ok) {
        finish(DecodeStatus::Unique, true);
        break;
      }
      if (attempt >= opt_.max_retries) {
        finish(DecodeStatus::Ambiguous, false);
        break;
      }
      ++res_.retries;
      ++confirm;
      for (auto& blk : blocks_) blk.done = false;
    }
    return std::move(res_);
  }

 private:
  ParityRound execute(std::span<const std::size_t> subset, std::size_t dest) {
    const auto live = ch_.live_indices();
    res_.schedule.rows.push_back(compact_mask(live, subset, n_start_));
    auto round = ch_.z_round(subset, dest);
    log_round(log_, live, round);
    res_.transcript.push_back(round);
    const auto [b, j] = block_of_.at(dest);
    blocks_[b].live[j] = false;
    return round;
  }

  void advance(Block& blk, std::size_t confirm) {
    const std::size_t len = blk.cols.size();
    while (!blk.done) {
      const std::size_t m = blk.system.n_rows();
      std::ptrdiff_t w_max = -1;
      for (std::size_t w = 0; w <= len; ++w) {
        if (blk.log2_volume[w] + static_cast<double>(confirm) > static_cast<double>(m) + 1e-9) break;
        w_max = static_cast<std::ptrdiff_t>(w);
      }
      if (w_max >= 0) {
        if (w_max > blk.cached_w || !blk.complete) {
          blk.complete = blk.system.enumerate(static_cast<std::size_t>(w_max), kCandidateLimit,
                                              opt_.search_budget, blk.cands);
          blk.cached_w = w_max;
        }
        const auto [est, err] = blk.complete && !blk.cands.empty()
                                    ? map_estimate(blk, static_cast<std::size_t>(w_max))
                                    : std::pair<std::uint64_t, double>{0, 1.0};
        if (err <= std::exp2(-static_cast<double>(confirm))) {
          blk.estimate = est;
          blk.done = true;
          if (log_) log_->append(Party::Bob, MessageKind::Decision, {1});
          return;
        }
      }
      if (blk.live_count() < 2) {
        blk.stuck = true;
        return;
      }
      std::vector<std::size_t> members;
      for (std::size_t j = 0; j < len; ++j)
        if (blk.live[j]) members.push_back(j);
      const auto pos = random_subset(rng_, members.size());
      std::vector<std::size_t> subset;
      std::uint64_t row = 0;
      for (auto p : pos) {
        subset.push_back(blk.cols[members[p]]);
        row |= std::uint64_t{1} << members[p];
      }
      const std::size_t dest = subset[uniform_index(rng_, subset.size())];
      const auto round = execute(subset, dest);
      blk.system.add_row(row, round.syndrome());
      std::erase_if(blk.cands, [&](std::uint64_t x) {
        return static_cast<Bit>(std::popcount(x & row) & 1) != round.syndrome();
      });
    }
  }

  // Most likely error pattern on the block's live pairs, and the chance that
  // it is wrong. Candidates that differ only on discarded pairs are merged;
  // heavier strings beyond the enumerated ball enter through their expected
  // count, all weighted by the prior.
  std::pair<std::uint64_t, double> map_estimate(const Block& blk, std::size_t w_max) const {
    const double lr = std::log2(opt_.prior_delta / (1.0 - opt_.prior_delta));
    std::uint64_t live_mask = 0;
    for (std::size_t j = 0; j < blk.live.size(); ++j)
      if (blk.live[j]) live_mask |= std::uint64_t{1} << j;
    std::size_t w_min = 64;
    for (auto x : blk.cands) w_min = std::min<std::size_t>(w_min, static_cast<std::size_t>(std::popcount(x)));
    std::unordered_map<std::uint64_t, double> mass;
    double total = 0.0;
    for (auto x : blk.cands) {
      const double p = std::exp2(lr * (static_cast<double>(std::popcount(x)) - static_cast<double>(w_min)));
      mass[x & live_mask] += p;
      total += p;
    }
    const std::size_t len = blk.cols.size();
    const double rank = static_cast<double>(blk.system.rank());
    for (std::size_t w = w_max + 1; w <= len; ++w) {
      const double log_c = (std::lgamma(len + 1.0) - std::lgamma(w + 1.0) - std::lgamma(len - w + 1.0)) / std::log(2.0);
      total += std::exp2(log_c - rank + lr * (static_cast<double>(w) - static_cast<double>(w_min)));
    }
    std::uint64_t best = 0;
    double best_mass = -1.0;
    for (const auto& [x, p] : mass)
      if (p > best_mass || (p == best_mass && x < best)) {
        best = x;
        best_mass = p;
      }
    return {best, 1.0 - best_mass / total};
  }

  Bit estimated(std::size_t stable) const {
    const auto [b, j] = block_of_.at(stable);
    return static_cast<Bit>((blocks_[b].estimate >> j) & 1u);
  }

  bool verify() {
    bool ok = true;
    for (std::size_t v = 0; v < opt_.verify_rounds; ++v) {
      const auto live = ch_.live_indices();
      if (live.size() < 2) break;
      const auto pos = random_subset(rng_, live.size());
      std::vector<std::size_t> subset;
      for (auto p : pos) subset.push_back(live[p]);
      const std::size_t dest = subset[uniform_index(rng_, subset.size())];
      Bit predicted = 0;
      for (auto s : subset) predicted ^= estimated(s);
      const auto round = execute(subset, dest);
      ok &= predicted == round.syndrome();
    }
    if (log_) log_->append(Party::Bob, MessageKind::Decision, {static_cast<Bit>(ok)});
    return ok;
  }

  void finish(DecodeStatus status, bool correct) {
    res_.report.decode_status = status;
    res_.report.rounds_used = res_.transcript.size();
    if (!correct) return;
    for (auto s : ch_.live_indices()) {
      if (estimated(s)) {
        ch_.correct_bob(s);
        res_.report.corrected_positions.push_back(s);
      }
    }
  }

  ParityChannel& ch_;
  Rng& rng_;
  AdaptiveEcOptions opt_;
  Transcript* log_;
  std::size_t n_start_ = 0;
  std::vector<Block> blocks_;
  std::unordered_map<std::size_t, std::pair<std::size_t, std::size_t>> block_of_;
  AdaptiveEcResult res_;
};

}  // namespace

FixedEcResult run_ec_fixed(ParityChannel& channel, Rng& public_rng, const FixedEcOptions& options,
                           Transcript* log) {
  FixedEcResult res;
  const auto columns = channel.live_indices();
  const std::size_t n = columns.size();
  std::unordered_map<std::size_t, std::size_t> col_of;
  for (std::size_t j = 0; j < n; ++j) col_of[columns[j]] = j;
  ParityMatrix system;
  system.n_cols = n;
  BitString syndromes;

  // Returns false when the pairs ran out.
  auto execute = [&](std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto live = channel.live_indices();
      if (live.size() < 2) return false;
      const auto pos = random_subset(public_rng, live.size());
      std::vector<std::size_t> subset;
      for (auto p : pos) subset.push_back(live[p]);
      const std::size_t dest = subset[uniform_index(public_rng, subset.size())];
      auto round = channel.z_round(subset, dest);
      log_round(log, live, round);
      BitVector row(n);
      for (auto s : subset) row.set(col_of.at(s), true);
      system.rows.push_back(std::move(row));
      syndromes.push_back(round.syndrome());
      res.transcript.push_back(std::move(round));
    }
    return true;
  };
  auto decode = [&]() -> std::pair<DecodeStatus, BitString> {
    if (n <= 24) {
      const auto cands = decode_exhaustive(syndromes, system, options.radius);
      if (cands.empty()) return {DecodeStatus::OutOfRadius, {}};
      if (cands.size() > 1) return {DecodeStatus::Ambiguous, {}};
      return {DecodeStatus::Unique, cands.front()};
    }
    const auto r = min_weight_solutions(system.rows, BitVector::from_bits(syndromes), n,
                                        options.radius, 2, options.search_budget);
    if (r.budget_exhausted || (r.min_weight && r.solutions.size() > 1))
      return {DecodeStatus::Ambiguous, {}};
    if (!r.consistent || !r.min_weight) return {DecodeStatus::OutOfRadius, {}};
    return {DecodeStatus::Unique, r.solutions.front().to_bits()};
  };

  auto finish = [&](DecodeStatus status, const BitString* estimate) {
    res.report.decode_status = status;
    res.report.rounds_used = res.transcript.size();
    if (!estimate) return res;
    for (auto s : channel.live_indices())
      if ((*estimate)[col_of.at(s)]) {
        channel.correct_bob(s);
        res.report.corrected_positions.push_back(s);
      }
    return res;
  };

  std::size_t to_run = options.rounds;
  for (std::size_t attempt = 0;; ++attempt) {
    if (!execute(to_run)) return finish(DecodeStatus::OutOfRadius, nullptr);
    auto [status, estimate] = decode();
    if (status == DecodeStatus::OutOfRadius) return finish(status, nullptr);
    if (status == DecodeStatus::Unique) {
      const std::size_t first = syndromes.size();
      if (!execute(options.verify_rounds)) return finish(DecodeStatus::OutOfRadius, nullptr);
      bool ok = true;
      for (std::size_t r = first; r < syndromes.size(); ++r) {
        Bit predicted = 0;
        for (auto j : system.rows[r].ones()) predicted ^= estimate[j];
        ok &= predicted == syndromes[r];
      }
      if (log) log->append(Party::Bob, MessageKind::Decision, {static_cast<Bit>(ok)});
      if (ok) return finish(DecodeStatus::Unique, &estimate);
      status = DecodeStatus::Ambiguous;
    }
    if (attempt >= options.max_retries) return finish(status, nullptr);
    ++res.retries;
    to_run = std::max<std::size_t>(1, options.retry_rounds);
  }
}

AdaptiveEcResult run_ec_adaptive(ParityChannel& channel, Rng& public_rng,
                                 const AdaptiveEcOptions& options, Transcript* log) {
  return AdaptiveRunner(channel, public_rng, options, log).run();
}

}  // namespace bdsw
