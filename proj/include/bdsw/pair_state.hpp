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
#include <string_view>
#include <utility>
#include <vector>

#include "bdsw/bits.hpp"
#include "bdsw/random.hpp"

namespace bdsw {

enum class Basis { Z, X };
enum class Pauli { I, X, Y, Z };
enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

/// One Bell pair as its (bit-flip, phase-flip) label relative to |phi+>.
/// (0,0) |phi+>, (0,1) |phi->, (1,0) |psi+>, (1,1) |psi->.
struct PairState {
  Bit a = 0;
  Bit b = 0;
  bool tagged = false;
  Basis tag_basis = Basis::Z;  // meaningful only when tagged

  bool operator==(const PairState&) const = default;
};

BellLabel bell_label(const PairState& p);
PairState from_bell_label(BellLabel label);
std::string_view to_string(BellLabel label);

/// Channel Pauli acting on one half of the pair. X flips a, Z flips b, Y both.
PairState apply_pauli(PairState p, Pauli op);

/// Ordered pairs with stable indices; discarded pairs keep their slot.
class Ensemble {
 public:
  Ensemble() = default;
  explicit Ensemble(std::vector<PairState> pairs)
      : pairs_(std::move(pairs)), alive_(pairs_.size(), true) {}

  std::size_t size() const { return pairs_.size(); }
  std::size_t live_count() const;
  bool alive(std::size_t i) const { return alive_.at(i); }
  const PairState& operator[](std::size_t i) const { return pairs_.at(i); }
  PairState& operator[](std::size_t i) { return pairs_.at(i); }
  const std::vector<PairState>& pairs() const { return pairs_; }

  /// Live → discarded only; discarding twice is an error.
  void discard(std::size_t i);
  std::vector<std::size_t> live_indices() const;

  /// Bit/phase strings over live pairs in index order.
  std::pair<BitString, BitString> strings() const;

  /// Exchanges bit and phase labels of every pair.
  Ensemble transposed() const;

 private:
  std::vector<PairState> pairs_;
  std::vector<bool> alive_;
};

Ensemble ensemble_from_strings(std::span<const Bit> s_b, std::span<const Bit> s_p);

enum class Sampling { ExactCount, Bernoulli };
enum class TagBasisMode { Uniform, AllZ, AllX };

struct ChannelParams {
  double delta_b = 0.0;
  double delta_p = 0.0;
  double tag_fraction = 0.0;
  Sampling sampling = Sampling::ExactCount;
  /// When set, phase flips are placed on bit-flip positions first.
  bool correlate = false;
  TagBasisMode tag_basis = TagBasisMode::AllZ;

  void validate() const;
};

/// Noisy ensemble of n pairs. Tagged pairs measured by Alice in Z carry a
/// uniformly random phase label; X-tagged pairs carry a uniformly random bit
/// label and no phase flip. Weights are exact only for untagged sampling.
Ensemble sample_ensemble(const ChannelParams& params, std::size_t n, Rng& rng);

}  // namespace bdsw
