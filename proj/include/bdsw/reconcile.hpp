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
#include <string>
#include <string_view>
#include <vector>

#include "bdsw/bits.hpp"
#include "bdsw/hashing.hpp"
#include "bdsw/pair_state.hpp"
#include "bdsw/random.hpp"
#include "bdsw/transcript.hpp"

namespace bdsw {

enum class MatrixKind { Random, Structured };

/// Rows of a hashing schedule in execution order.
///
/// As an input schedule, row i is a mask over the pairs still live when it
/// executes (compact positions 0..N-i-1), matching the shrinking ensemble.
/// As a linear system (what the decoders consume), every row is a mask over
/// the fixed columns 0..n_cols-1.
///
/// Text form: first line `n_rows n_cols`, then one big-endian hex mask of
/// n_cols bits per line.
struct ParityMatrix {
  std::vector<BitVector> rows;
  std::size_t n_cols = 0;
  MatrixKind kind = MatrixKind::Random;

  std::size_t n_rows() const { return rows.size(); }
  std::string serialize() const;
  static ParityMatrix parse(std::string_view text, MatrixKind kind = MatrixKind::Random);
};

/// Random schedule for `n` live pairs: row i covers at least two of the
/// first n-i compact positions.
ParityMatrix random_parity_matrix(std::size_t n, std::size_t n_rows, Rng& rng);

/// ceil(n H(delta_b)) + slack.
std::size_t ec_round_budget(std::size_t n, double delta_b, std::size_t slack);

enum class DecodeStatus { Unique, Ambiguous, OutOfRadius };
std::string_view to_string(DecodeStatus s);

struct EcReport {
  std::size_t rounds_used = 0;
  DecodeStatus decode_status = DecodeStatus::Unique;
  std::size_t residual_bit_errors = 0;
  std::vector<std::size_t> corrected_positions;  // stable indices
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every string of weight <= radius over `matrix.n_cols` columns whose
/// syndrome equals `parities`. Throws DecodeError when the ball holds more
/// than `budget` strings.
std::vector<BitString> decode_exhaustive(std::span<const Bit> parities, const ParityMatrix& matrix,
                                         std::size_t radius, std::size_t budget = 1'000'000);

/// Minimum-weight solutions of H x = s found by elimination plus a search of
/// the solution coset in order of free-variable weight.
struct MinWeightResult {
  bool consistent = false;
  std::optional<std::size_t> min_weight;  // empty: nothing within max_weight
  std::vector<BitVector> solutions;       // at most `keep` of the minimum weight
  std::size_t rank = 0;
  bool budget_exhausted = false;
};
MinWeightResult min_weight_solutions(const std::vector<BitVector>& rows, const BitVector& rhs,
                                     std::size_t n_cols, std::size_t max_weight,
                                     std::size_t keep = 2, std::size_t budget = 50'000'000);

/// Minimum-weight string consistent with the parities. Throws DecodeError on
/// an inconsistent system or when no solution of weight <= max_weight exists.
BitString decode_gaussian(std::span<const Bit> parities, const ParityMatrix& matrix,
                          std::size_t max_weight = 6);

/// Something that can run Z-basis parity rounds on live pairs (or bits) and
/// apply Bob's corrections. Indices are stable.
class ParityChannel {
 public:
  virtual ~ParityChannel() = default;
  virtual std::vector<std::size_t> live_indices() const = 0;
  virtual ParityRound z_round(std::span<const std::size_t> subset, std::size_t dest) = 0;
  virtual void correct_bob(std::size_t index) = 0;
};

/// ParityChannel over a label ensemble; Alice's destination outcomes come
/// from `alice_rng`.
class EnsembleChannel final : public ParityChannel {
 public:
  EnsembleChannel(Ensemble e, Rng& alice_rng) : e_(std::move(e)), rng_(&alice_rng) {}
  std::vector<std::size_t> live_indices() const override { return e_.live_indices(); }
  ParityRound z_round(std::span<const std::size_t> subset, std::size_t dest) override;
  void correct_bob(std::size_t index) override { e_[index] = apply_pauli(e_[index], Pauli::X); }
  const Ensemble& ensemble() const { return e_; }

 private:
  Ensemble e_;
  Rng* rng_;
};

enum class Decoder { Auto, Exhaustive, Gaussian };

struct EcOptions {
  std::size_t radius = 0;
  Decoder decoder = Decoder::Auto;  // Auto: exhaustive up to 24 columns
};

struct EcResult {
  std::vector<ParityRound> transcript;
  ParityMatrix linearized;          // over the pairs live at the start
  std::vector<std::size_t> columns; // stable index of each linearized column
  EcReport report;
};

/// Runs one Z round per schedule row (destinations drawn from `public_rng`),
/// decodes the bit-error string of the starting pairs, and flips Bob's side of
/// every surviving error when decoding is unique.
EcResult run_ec(ParityChannel& channel, const ParityMatrix& schedule, Rng& public_rng,
                const EcOptions& options, Transcript* log = nullptr);

/// Label-ensemble convenience form of run_ec.
struct EnsembleEcResult {
  Ensemble ensemble;
  EcResult ec;
};
EnsembleEcResult run_ec(const Ensemble& e, const ParityMatrix& schedule, Rng& rng,
                        const EcOptions& options);

/// Fixed-budget reconciliation with retries. Runs `rounds` random rounds over
/// the live pairs, decodes the starting pairs' error string (exhaustive ball
/// search up to 24 columns, minimum-weight coset search beyond), and checks
/// a unique answer with `verify_rounds` further random rounds. An ambiguous
/// or refuted answer adds `retry_rounds` rounds and decodes again, up to
/// `max_retries` times; every executed round stays in the system.
struct FixedEcOptions {
  std::size_t rounds = 0;
  std::size_t retry_rounds = 10;
  std::size_t max_retries = 3;
  std::size_t radius = 0;
  std::size_t verify_rounds = 10;
  std::size_t search_budget = 50'000'000;
};

struct FixedEcResult {
  std::vector<ParityRound> transcript;
  EcReport report;
  std::size_t retries = 0;
};

FixedEcResult run_ec_fixed(ParityChannel& channel, Rng& public_rng, const FixedEcOptions& options,
                           Transcript* log = nullptr);

/// Block-adaptive reconciliation used for long strings.
///
/// The live pairs are permuted at random and cut into blocks of at most 64.
/// Each block is hashed one round at a time. After every round Bob lists all
/// consistent patterns inside the largest Hamming ball whose volume is below
/// 2^(rounds - confirm_bits), and stops the block once the most likely
/// pattern on its live pairs (under a prior_delta bit-error prior, counting
/// the expected strings outside the ball) is wrong with probability at most
/// 2^-confirm_bits. Then `verify_rounds` global rounds check the combined
/// estimate; on mismatch the margin grows by one and every block resumes, up
/// to `max_retries` times.
struct AdaptiveEcOptions {
  std::size_t block_size = 64;
  std::size_t confirm_bits = 5;
  std::size_t verify_rounds = 10;
  std::size_t max_retries = 3;
  std::size_t search_budget = 20'000'000;
  double prior_delta = 0.05;
};

struct AdaptiveEcResult {
  std::vector<ParityRound> transcript;
  ParityMatrix schedule;  // Structured, compact masks per executed round
  EcReport report;
  std::size_t retries = 0;
};

AdaptiveEcResult run_ec_adaptive(ParityChannel& channel, Rng& public_rng,
                                 const AdaptiveEcOptions& options, Transcript* log = nullptr);

/// log2 of the Hamming-ball volume sum_{j<=w} C(n, j).
double log2_ball_volume(std::size_t n, std::size_t w);

}  // namespace bdsw
