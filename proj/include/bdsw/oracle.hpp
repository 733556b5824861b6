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

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bdsw/hashing.hpp"
#include "bdsw/pair_state.hpp"
#include "bdsw/random.hpp"

namespace bdsw::oracle {

using Matrix2 = Eigen::Matrix2cd;

/// Pure state on up to 12 qubits. Qubit q is bit q of the basis index.
/// Pair i lives on Alice wire 2i and Bob wire 2i+1.
class StateVector {
 public:
  static constexpr std::size_t kMaxQubits = 12;

  explicit StateVector(std::size_t qubits);
  /// Product of Bell pairs with the given labels.
  static StateVector bell_pairs(std::span<const PairState> pairs);

  std::size_t qubits() const { return qubits_; }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  double norm() const { return amp_.norm(); }

  void apply(const Matrix2& u, std::size_t q);
  void cnot(std::size_t control, std::size_t target);
  void hadamard(std::size_t q);

  /// <Z_p Z_q> and <X_p X_q>.
  double zz(std::size_t p, std::size_t q) const;
  double xx(std::size_t p, std::size_t q) const;

  /// Probability that Z measurements of p and q give (bp, bq).
  double probability(std::size_t p, Bit bp, std::size_t q, Bit bq) const;
  /// Projects p and q onto (bp, bq) and renormalizes.
  void project(std::size_t p, Bit bp, std::size_t q, Bit bq);

  /// Bell label of pair i read from its ZZ and XX correlations; `exact`
  /// reports whether both correlations are +-1.
  PairState label(std::size_t pair, bool* exact = nullptr) const;

 private:
  std::size_t qubits_;
  Eigen::VectorXcd amp_;
};

using BicnotFn = std::function<std::pair<PairState, PairState>(PairState, PairState)>;

struct TruthEntry {
  PairState control_in, target_in;
  PairState control_out, target_out;
  bool exact_bell = true;
};

/// All 16 input label pairs through CNOTs on Alice's and Bob's wires
/// (first pair controls).
std::vector<TruthEntry> bicnot_truth_table();

/// Entries where `impl` disagrees with the simulated table, as text.
std::vector<std::string> check_bicnot(const BicnotFn& impl);

/// Probabilistic mixture of single-qubit operations on Bob's wire.
struct Channel {
  std::vector<double> weights;
  std::vector<Matrix2> ops;

  void validate() const;  // unitary ops, non-negative weights summing to 1 within 1e-9
  static Matrix2 pauli(Pauli p);
  static Channel pauli_mixture(const std::array<double, 4>& weights);
};

struct PhaseIndependenceResult {
  double fraction = 0.0;   // sampled X-basis disagreement
  double exact = 0.0;      // the same probability from the amplitudes
  std::size_t trials = 0;
};

/// Prepares |00> or |11> at random, applies `channel` to Bob's qubit,
/// measures both qubits in X and reports how often they disagree.
PhaseIndependenceResult tagged_phase_independence(const Channel& channel, std::size_t trials,
                                                  Rng& rng);

struct ScriptRound {
  Basis basis = Basis::Z;
  std::vector<std::size_t> subset;
  std::size_t dest = 0;
};

struct ProtocolCheckReport {
  std::size_t cases = 0;
  std::size_t agreements = 0;
  double max_norm_error = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return agreements == cases && failures.empty(); }
};

/// For every one of the 4^n label assignments, runs `script` in the label
/// algebra and on the 2n-qubit state, comparing each announced parity and
/// every survivor label. Throws std::invalid_argument for n > 6.
ProtocolCheckReport exhaustive_protocol_check(std::size_t n, const std::vector<ScriptRound>& script);

/// Script of `rounds` random rounds on n pairs with random bases.
std::vector<ScriptRound> random_script(std::size_t n, std::size_t rounds, Rng& rng);

}  // namespace bdsw::oracle
