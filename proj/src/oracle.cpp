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

#include "bdsw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bdsw::oracle {

namespace {

using cd = std::complex<double>;
constexpr double kTol = 1e-9;

std::string label_text(const PairState& p) {
  return "(" + std::to_string(p.a) + "," + std::to_string(p.b) + ")";
}

}  // namespace

StateVector::StateVector(std::size_t qubits) : qubits_(qubits) {
  if (qubits == 0 || qubits > kMaxQubits)
    throw std::invalid_argument("StateVector: qubit count must be in [1, 12]");
  amp_ = Eigen::VectorXcd::Zero(Eigen::Index{1} << qubits);
  amp_(0) = 1.0;
}

StateVector StateVector::bell_pairs(std::span<const PairState> pairs) {
  StateVector s(2 * pairs.size());
  s.amp_.setZero();
  const double scale = std::pow(0.5, 0.5 * static_cast<double>(pairs.size()));
  // |chi_ab> = (|0,a> + (-1)^b |1,1^a>) / sqrt 2 on each pair.
  for (std::size_t m = 0; m < (std::size_t{1} << pairs.size()); ++m) {
    std::size_t idx = 0;
    double sign = 1.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::size_t alice = (m >> i) & 1u;
      const std::size_t bob = alice ^ pairs[i].a;
      if (alice && pairs[i].b) sign = -sign;
      idx |= alice << (2 * i);
      idx |= bob << (2 * i + 1);
    }
    s.amp_(static_cast<Eigen::Index>(idx)) = sign * scale;
  }
  return s;
}

void StateVector::apply(const Matrix2& u, std::size_t q) {
  const Eigen::Index bit = Eigen::Index{1} << q;
  for (Eigen::Index i = 0; i < amp_.size(); ++i) {
    if (i & bit) continue;
    const cd a0 = amp_(i), a1 = amp_(i | bit);
    amp_(i) = u(0, 0) * a0 + u(0, 1) * a1;
    amp_(i | bit) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

void StateVector::cnot(std::size_t control, std::size_t target) {
  if (control == target) throw std::invalid_argument("cnot: control equals target");
  const Eigen::Index c = Eigen::Index{1} << control, t = Eigen::Index{1} << target;
  for (Eigen::Index i = 0; i < amp_.size(); ++i)
    if ((i & c) && !(i & t)) std::swap(amp_(i), amp_(i | t));
}

void StateVector::hadamard(std::size_t q) {
  Matrix2 h;
  h << 1.0, 1.0, 1.0, -1.0;
  apply(h / std::sqrt(2.0), q);
}

double StateVector::zz(std::size_t p, std::size_t q) const {
  double e = 0.0;
  for (Eigen::Index i = 0; i < amp_.size(); ++i) {
    const bool odd = (((i >> p) ^ (i >> q)) & 1) != 0;
    e += (odd ? -1.0 : 1.0) * std::norm(amp_(i));
  }
  return e;
}

double StateVector::xx(std::size_t p, std::size_t q) const {
  const Eigen::Index flip = (Eigen::Index{1} << p) | (Eigen::Index{1} << q);
  cd e = 0.0;
  for (Eigen::Index i = 0; i < amp_.size(); ++i) e += std::conj(amp_(i)) * amp_(i ^ flip);
  return e.real();
}

double StateVector::probability(std::size_t p, Bit bp, std::size_t q, Bit bq) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < amp_.size(); ++i)
    if (static_cast<Bit>((i >> p) & 1) == bp && static_cast<Bit>((i >> q) & 1) == bq)
      s += std::norm(amp_(i));
  return s;
}

void StateVector::project(std::size_t p, Bit bp, std::size_t q, Bit bq) {
  for (Eigen::Index i = 0; i < amp_.size(); ++i)
    if (static_cast<Bit>((i >> p) & 1) != bp || static_cast<Bit>((i >> q) & 1) != bq) amp_(i) = 0.0;
  const double n = amp_.norm();
  if (n < kTol) throw std::logic_error("project: outcome has zero probability");
  amp_ /= n;
}

PairState StateVector::label(std::size_t pair, bool* exact) const {
  const double z = zz(2 * pair, 2 * pair + 1);
  const double x = xx(2 * pair, 2 * pair + 1);
  if (exact) *exact = std::abs(std::abs(z) - 1.0) < kTol && std::abs(std::abs(x) - 1.0) < kTol;
  PairState s;
  s.a = z < 0.0;
  s.b = x < 0.0;
  return s;
}

std::vector<TruthEntry> bicnot_truth_table() {
  std::vector<TruthEntry> out;
  for (int in = 0; in < 16; ++in) {
    TruthEntry t;
    t.control_in = {static_cast<Bit>(in >> 3 & 1), static_cast<Bit>(in >> 2 & 1)};
    t.target_in = {static_cast<Bit>(in >> 1 & 1), static_cast<Bit>(in & 1)};
    const std::array<PairState, 2> pairs{t.control_in, t.target_in};
    auto s = StateVector::bell_pairs(pairs);
    s.cnot(0, 2);
    s.cnot(1, 3);
    bool e0 = false, e1 = false;
    t.control_out = s.label(0, &e0);
    t.target_out = s.label(1, &e1);
    t.exact_bell = e0 && e1;
    out.push_back(t);
  }
  return out;
}

std::vector<std::string> check_bicnot(const BicnotFn& impl) {
  std::vector<std::string> bad;
  for (const auto& t : bicnot_truth_table()) {
    const auto [c, d] = impl(t.control_in, t.target_in);
    const bool same = c.a == t.control_out.a && c.b == t.control_out.b &&
                      d.a == t.target_out.a && d.b == t.target_out.b;
    if (!same || !t.exact_bell)
      bad.push_back(label_text(t.control_in) + label_text(t.target_in) + " -> expected " +
                    label_text(t.control_out) + label_text(t.target_out) + ", got " +
                    label_text(c) + label_text(d));
  }
  return bad;
}

Matrix2 Channel::pauli(Pauli p) {
  Matrix2 m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, cd(0, -1), cd(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Channel Channel::pauli_mixture(const std::array<double, 4>& weights) {
  Channel c;
  const std::array<Pauli, 4> ps{Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  for (std::size_t i = 0; i < 4; ++i) {
    c.weights.push_back(weights[i]);
    c.ops.push_back(pauli(ps[i]));
  }
  return c;
}

void Channel::validate() const {
  if (weights.empty() || weights.size() != ops.size())
    throw std::invalid_argument("Channel: need one weight per operation");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("Channel: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("Channel: weights must sum to 1");
  for (const auto& u : ops)
    if (!(u.adjoint() * u).isApprox(Matrix2::Identity(), 1e-9))
      throw std::invalid_argument("Channel: operation is not unitary");
}

PhaseIndependenceResult tagged_phase_independence(const Channel& channel, std::size_t trials,
                                                  Rng& rng) {
  channel.validate();
  // Post-measurement X-basis disagreement probability for each preparation and operation.
  std::array<std::vector<double>, 2> p_dis;
  PhaseIndependenceResult res;
  for (Bit v : {Bit{0}, Bit{1}}) {
    for (std::size_t k = 0; k < channel.ops.size(); ++k) {
      StateVector s(2);
      if (v) {
        s.apply(Channel::pauli(Pauli::X), 0);
        s.apply(Channel::pauli(Pauli::X), 1);
      }
      s.apply(channel.ops[k], 1);
      s.hadamard(0);
      s.hadamard(1);
      const double d = s.probability(0, 0, 1, 1) + s.probability(0, 1, 1, 0);
      p_dis[v].push_back(d);
      res.exact += 0.5 * channel.weights[k] * d;
    }
  }
  std::discrete_distribution<std::size_t> pick(channel.weights.begin(), channel.weights.end());
  std::size_t dis = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Bit v = static_cast<Bit>(coin(rng));
    dis += bernoulli(rng, p_dis[v][pick(rng)]);
  }
  res.trials = trials;
  res.fraction = trials ? static_cast<double>(dis) / static_cast<double>(trials) : 0.0;
  return res;
}

ProtocolCheckReport exhaustive_protocol_check(std::size_t n, const std::vector<ScriptRound>& script) {
  if (n == 0 || n > StateVector::kMaxQubits / 2)
    throw std::invalid_argument("exhaustive_protocol_check: n must be in [1, 6]");
  ProtocolCheckReport rep;
  for (std::size_t code = 0; code < (std::size_t{1} << (2 * n)); ++code) {
    std::vector<PairState> pairs(n);
    for (std::size_t i = 0; i < n; ++i) {
      pairs[i].a = static_cast<Bit>(code >> (2 * i) & 1);
      pairs[i].b = static_cast<Bit>(code >> (2 * i + 1) & 1);
    }
    ++rep.cases;
    Ensemble e(pairs);
    auto state = StateVector::bell_pairs(pairs);
    bool ok = true;
    auto fail = [&](std::size_t r, const std::string& what) {
      std::ostringstream msg;
      msg << "assignment " << code << " round " << r << ": " << what;
      rep.failures.push_back(msg.str());
      ok = false;
    };
    for (std::size_t r = 0; r < script.size() && ok; ++r) {
      const auto& sr = script[r];
      const auto out = sr.basis == Basis::Z ? z_parity_round(e, sr.subset, sr.dest, Bit{0})
                                            : x_parity_round(e, sr.subset, sr.dest, Bit{0});
      const std::size_t da = 2 * sr.dest, db = 2 * sr.dest + 1;
      for (auto c : sr.subset) {
        if (c == sr.dest) continue;
        if (sr.basis == Basis::Z) {
          state.cnot(2 * c, da);
          state.cnot(2 * c + 1, db);
        } else {
          state.cnot(da, 2 * c);
          state.cnot(db, 2 * c + 1);
        }
      }
      if (sr.basis == Basis::X) {
        state.hadamard(da);
        state.hadamard(db);
      }
      // Every outcome the state allows must show the announced syndrome.
      const Bit syn = out.round.syndrome();
      for (Bit ma : {Bit{0}, Bit{1}})
        for (Bit mb : {Bit{0}, Bit{1}})
          if (state.probability(da, ma, db, mb) > kTol && (ma ^ mb) != syn)
            fail(r, "measured parity differs from the label algebra");
      if (!ok) break;
      state.project(da, 0, db, syn);
      rep.max_norm_error = std::max(rep.max_norm_error, std::abs(state.norm() - 1.0));
      e = out.ensemble;
      for (auto i : e.live_indices()) {
        bool exact = false;
        const auto l = state.label(i, &exact);
        if (!exact || l.a != e[i].a || l.b != e[i].b) fail(r, "survivor label differs on pair " + std::to_string(i));
      }
    }
    if (ok) ++rep.agreements;
  }
  return rep;
}

std::vector<ScriptRound> random_script(std::size_t n, std::size_t rounds, Rng& rng) {
  Ensemble e{std::vector<PairState>(n)};
  std::vector<ScriptRound> out;
  for (std::size_t r = 0; r < rounds && e.live_count() >= 2; ++r) {
    auto [subset, dest] = draw_round(e, rng);
    ScriptRound sr{coin(rng) ? Basis::X : Basis::Z, std::move(subset), dest};
    e.discard(dest);
    out.push_back(std::move(sr));
  }
  return out;
}

}  // namespace bdsw::oracle
