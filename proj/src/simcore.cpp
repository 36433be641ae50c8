// Copyright 2026 The qkdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qkdist/simcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "qkdist/error.hpp"

namespace qkdist {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr double kDefiniteTolerance = 1e-10;

std::size_t bit(int q) { return std::size_t{1} << q; }

}  // namespace

int GateOp::arity() const {
  switch (kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Z:
      return 1;
    case GateKind::CX:
      return 2;
    case GateKind::CSWAP:
      return 3;
  }
  return 1;
}

std::string to_string(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::None:
      return "none";
    case NoiseLevel::L1:
      return "l1";
    case NoiseLevel::L2:
      return "l2";
  }
  return "none";
}

NoiseLevel noise_level_from_string(const std::string &text) {
  if (text == "none") return NoiseLevel::None;
  if (text == "l1") return NoiseLevel::L1;
  if (text == "l2") return NoiseLevel::L2;
  throw ConfigError("unknown noise level '" + text + "' (expected none, l1 or l2)");
}

NoiseModel NoiseModel::from_level(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::None:
      return none();
    case NoiseLevel::L1:
      return level1();
    case NoiseLevel::L2:
      return level2();
  }
  return none();
}

void NoiseModel::validate() const {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0))
    throw ContractViolation("noise probabilities must lie in [0, 1]");
  if (level == NoiseLevel::None && (p1 != 0.0 || p2 != 0.0))
    throw ContractViolation("noise level 'none' requires p1 = p2 = 0");
}

StateVector::StateVector(int num_qubits, int max_qubits) : num_qubits_(num_qubits), max_qubits_(max_qubits) {
  if (num_qubits < 1) throw ContractViolation("a state needs at least one qubit");
  if (num_qubits > max_qubits)
    throw CapacityError("requested " + std::to_string(num_qubits) + " qubits, capacity is " +
                        std::to_string(max_qubits));
  amps_.assign(bit(num_qubits), Complex{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes, int max_qubits) {
  const std::size_t n = amplitudes.size();
  if (n < 2 || (n & (n - 1)) != 0) throw ContractViolation("amplitude count must be a power of two >= 2");
  int qubits = std::countr_zero(n);
  if (qubits > max_qubits)
    throw CapacityError("requested " + std::to_string(qubits) + " qubits, capacity is " + std::to_string(max_qubits));
  double norm = 0.0;
  for (const auto &a : amplitudes) norm += std::norm(a);
  if (std::abs(norm - 1.0) > kNormTolerance) throw ContractViolation("amplitudes are not normalized");
  StateVector s;
  s.num_qubits_ = qubits;
  s.max_qubits_ = max_qubits;
  s.amps_ = std::move(amplitudes);
  return s;
}

double StateVector::norm_squared() const {
  double total = 0.0;
  for (const auto &a : amps_) total += std::norm(a);
  return total;
}

void StateVector::check_qubit(int q) const {
  if (q < 0 || q >= num_qubits_)
    throw ContractViolation("qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(num_qubits_) + "-qubit state");
}

void StateVector::check_distinct(std::span<const int> qs) const {
  for (std::size_t i = 0; i < qs.size(); ++i) {
    check_qubit(qs[i]);
    for (std::size_t j = 0; j < i; ++j)
      if (qs[i] == qs[j]) throw ContractViolation("gate targets must be distinct");
  }
}

void StateVector::apply(const GateOp &gate) {
  check_distinct(gate.qubits());
  const auto &t = gate.targets;
  switch (gate.kind) {
    case GateKind::H:
      apply_h(t[0]);
      break;
    case GateKind::X:
      apply_x(t[0]);
      break;
    case GateKind::Z:
      apply_z(t[0]);
      break;
    case GateKind::CX:
      apply_cx(t[0], t[1]);
      break;
    case GateKind::CSWAP:
      apply_cswap(t[0], t[1], t[2]);
      break;
  }
}

void StateVector::apply_h(int q) {
  check_qubit(q);
  const std::size_t m = bit(q);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & m) continue;
    const Complex a0 = amps_[i];
    const Complex a1 = amps_[i | m];
    amps_[i] = (a0 + a1) * kInvSqrt2;
    amps_[i | m] = (a0 - a1) * kInvSqrt2;
  }
}

void StateVector::apply_x(int q) {
  check_qubit(q);
  const std::size_t m = bit(q);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if (!(i & m)) std::swap(amps_[i], amps_[i | m]);
}

void StateVector::apply_y(int q) {
  check_qubit(q);
  const std::size_t m = bit(q);
  const Complex I{0.0, 1.0};
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & m) continue;
    const Complex a0 = amps_[i];
    const Complex a1 = amps_[i | m];
    amps_[i] = -I * a1;
    amps_[i | m] = I * a0;
  }
}

void StateVector::apply_z(int q) {
  check_qubit(q);
  const std::size_t m = bit(q);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if (i & m) amps_[i] = -amps_[i];
}

void StateVector::apply_cx(int control, int target) {
  const int qs[] = {control, target};
  check_distinct(qs);
  const std::size_t c = bit(control), t = bit(target);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if ((i & c) && !(i & t)) std::swap(amps_[i], amps_[i | t]);
}

void StateVector::apply_cswap(int control, int a, int b) {
  const int qs[] = {control, a, b};
  check_distinct(qs);
  const std::size_t c = bit(control), ma = bit(a), mb = bit(b);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if ((i & c) && (i & ma) && !(i & mb)) std::swap(amps_[i], amps_[(i & ~ma) | mb]);
}

void StateVector::initialize_register(std::span<const int> qubits, std::span<const Complex> amplitudes) {
  check_distinct(qubits);
  if (qubits.empty() || amplitudes.size() != bit(static_cast<int>(qubits.size())))
    throw ContractViolation("register needs 2^k amplitudes for k qubits");
  double norm = 0.0;
  for (const auto &a : amplitudes) norm += std::norm(a);
  if (std::abs(norm - 1.0) > kNormTolerance) throw ContractViolation("register amplitudes are not normalized");

  std::size_t mask = 0;
  for (int q : qubits) mask |= bit(q);
  double excited = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if (i & mask) excited += std::norm(amps_[i]);
  if (excited > kNormTolerance) throw ContractViolation("register qubits are not in the ground state");

  std::vector<Complex> out(amps_.size(), Complex{0.0, 0.0});
  for (std::size_t rest = 0; rest < amps_.size(); ++rest) {
    if (rest & mask) continue;
    const Complex base = amps_[rest];
    if (base == Complex{0.0, 0.0}) continue;
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
      std::size_t idx = rest;
      for (std::size_t b = 0; b < qubits.size(); ++b)
        if (k & bit(static_cast<int>(b))) idx |= bit(qubits[b]);
      out[idx] = base * amplitudes[k];
    }
  }
  amps_ = std::move(out);
}

double StateVector::prob_zero(int q) const {
  check_qubit(q);
  const std::size_t m = bit(q);
  double p = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if (!(i & m)) p += std::norm(amps_[i]);
  return std::clamp(p, 0.0, 1.0);
}

int StateVector::measure(int q, Rng &rng) {
  const double p0 = prob_zero(q);
  const int outcome = rng.uniform() < p0 ? 0 : 1;
  const double p = outcome == 0 ? p0 : 1.0 - p0;
  const double scale = 1.0 / std::sqrt(p);
  const std::size_t m = bit(q);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const bool one = (i & m) != 0;
    if (one == (outcome == 1))
      amps_[i] *= scale;
    else
      amps_[i] = 0.0;
  }
  return outcome;
}

void StateVector::discard_measured(std::span<const int> qubits) {
  check_distinct(qubits);
  if (static_cast<int>(qubits.size()) >= num_qubits_)
    throw ContractViolation("cannot discard every qubit of a state");
  std::size_t mask = 0, value = 0;
  for (int q : qubits) {
    const double p0 = prob_zero(q);
    if (p0 > 1.0 - kDefiniteTolerance) {
      mask |= bit(q);
    } else if (p0 < kDefiniteTolerance) {
      mask |= bit(q);
      value |= bit(q);
    } else {
      throw ContractViolation("qubit " + std::to_string(q) + " is not in a definite basis state");
    }
  }
  const int remaining = num_qubits_ - static_cast<int>(qubits.size());
  std::vector<Complex> out(bit(remaining));
  std::vector<int> keep;
  for (int q = 0; q < num_qubits_; ++q)
    if (!(mask & bit(q))) keep.push_back(q);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::size_t idx = value;
    for (int b = 0; b < remaining; ++b)
      if (k & bit(b)) idx |= bit(keep[b]);
    out[k] = amps_[idx];
  }
  // Renormalize away the residual weight left on the discarded branch.
  double norm = 0.0;
  for (const auto &a : out) norm += std::norm(a);
  const double scale = 1.0 / std::sqrt(norm);
  for (auto &a : out) a *= scale;
  amps_ = std::move(out);
  num_qubits_ = remaining;
}

StateVector StateVector::tensor(const StateVector &high) const {
  const int total = num_qubits_ + high.num_qubits_;
  const int cap = std::min(max_qubits_, high.max_qubits_);
  if (total > cap)
    throw CapacityError("tensor product needs " + std::to_string(total) + " qubits, capacity is " +
                        std::to_string(cap));
  StateVector out;
  out.num_qubits_ = total;
  out.max_qubits_ = cap;
  out.amps_.resize(amps_.size() * high.amps_.size());
  for (std::size_t h = 0; h < high.amps_.size(); ++h)
    for (std::size_t l = 0; l < amps_.size(); ++l) out.amps_[h * amps_.size() + l] = amps_[l] * high.amps_[h];
  return out;
}

StateVector new_state(int num_qubits, int max_qubits) { return StateVector(num_qubits, max_qubits); }

StateVector apply_gate(StateVector state, const GateOp &gate) {
  state.apply(gate);
  return state;
}

int measure_qubit(StateVector &state, int q, Rng &rng) { return state.measure(q, rng); }

double prob_zero(const StateVector &state, int q) { return state.prob_zero(q); }

StateVector discard_measured(StateVector state, std::span<const int> qubits) {
  state.discard_measured(qubits);
  return state;
}

Complex overlap(const StateVector &a, const StateVector &b) {
  if (a.num_qubits() != b.num_qubits()) throw ContractViolation("overlap of states with different qubit counts");
  Complex total{0.0, 0.0};
  const auto aa = a.amplitudes();
  const auto bb = b.amplitudes();
  for (std::size_t i = 0; i < aa.size(); ++i) total += std::conj(aa[i]) * bb[i];
  return total;
}

PauliCode sample_pauli_error(int arity, const NoiseModel &model, Rng &rng) {
  const double p = model.probability(arity);
  if (p <= 0.0) return 0;
  if (!rng.bernoulli(p)) return 0;
  const std::uint64_t choices = (std::uint64_t{1} << (2 * arity)) - 1;
  return static_cast<PauliCode>(1 + rng.uniform_index(choices));
}

void apply_pauli_string(StateVector &state, std::span<const int> targets, PauliCode code) {
  for (int q : targets) {
    switch (code & 3u) {
      case 1:
        state.apply_x(q);
        break;
      case 2:
        state.apply_y(q);
        break;
      case 3:
        state.apply_z(q);
        break;
      default:
        break;
    }
    code >>= 2;
  }
}

PauliCode apply_pauli_noise(StateVector &state, std::span<const int> targets, const NoiseModel &model, Rng &rng) {
  const PauliCode code = sample_pauli_error(static_cast<int>(targets.size()), model, rng);
  if (code != 0) apply_pauli_string(state, targets, code);
  return code;
}

PauliCode ScheduledNoise::draw(int) {
  if (cursor_ >= codes_.size()) throw ContractViolation("noise schedule exhausted");
  return codes_[cursor_++];
}

void apply_noisy(StateVector &state, const GateOp &gate, NoiseSource &noise) {
  state.apply(gate);
  apply_noise_slot(state, gate.qubits(), noise);
}

void apply_noise_slot(StateVector &state, std::span<const int> targets, NoiseSource &noise) {
  const PauliCode code = noise.draw(static_cast<int>(targets.size()));
  if (code != 0) apply_pauli_string(state, targets, code);
}

}  // namespace qkdist
