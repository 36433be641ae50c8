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

// Dense statevector simulator.
//
// Qubit ordering is little-endian: qubit 0 is the least significant bit of the
// amplitude index, so |q1 q0> = |10> is amplitude index 2.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qkdist/rng.hpp"

namespace qkdist {

using Complex = std::complex<double>;

inline constexpr int kDefaultMaxQubits = 26;
inline constexpr double kNormTolerance = 1e-10;

enum class GateKind { H, X, Z, CX, CSWAP };

/// A gate and the qubits it acts on. For CX targets = {control, target}; for
/// CSWAP targets = {control, a, b}.
struct GateOp {
  GateKind kind;
  std::array<int, 3> targets{};

  int arity() const;
  std::span<const int> qubits() const { return {targets.data(), static_cast<std::size_t>(arity())}; }

  static GateOp h(int q) { return {GateKind::H, {q, 0, 0}}; }
  static GateOp x(int q) { return {GateKind::X, {q, 0, 0}}; }
  static GateOp z(int q) { return {GateKind::Z, {q, 0, 0}}; }
  static GateOp cx(int control, int target) { return {GateKind::CX, {control, target, 0}}; }
  static GateOp cswap(int control, int a, int b) { return {GateKind::CSWAP, {control, a, b}}; }
};

enum class NoiseLevel { None, L1, L2 };

std::string to_string(NoiseLevel level);
NoiseLevel noise_level_from_string(const std::string &text);

/// Depolarizing noise expressed directly as a Pauli-insertion probability:
/// after a k-qubit gate, with probability p1 (k = 1) or p2 (k >= 2) a uniformly
/// chosen non-identity Pauli string is applied to the gate's qubits.
struct NoiseModel {
  NoiseLevel level = NoiseLevel::None;
  double p1 = 0.0;
  double p2 = 0.0;

  static NoiseModel none() { return {}; }
  /// 0.1% per gate.
  static NoiseModel level1() { return {NoiseLevel::L1, 0.001, 0.001}; }
  /// 1% per gate.
  static NoiseModel level2() { return {NoiseLevel::L2, 0.01, 0.01}; }
  static NoiseModel from_level(NoiseLevel level);

  bool enabled() const { return p1 > 0.0 || p2 > 0.0; }
  double probability(int arity) const { return arity == 1 ? p1 : p2; }
  void validate() const;
};

class StateVector {
 public:
  /// |0...0> on num_qubits qubits.
  explicit StateVector(int num_qubits, int max_qubits = kDefaultMaxQubits);

  /// Wraps an explicit amplitude vector; length must be a power of two >= 2
  /// and the vector normalized within kNormTolerance.
  static StateVector from_amplitudes(std::vector<Complex> amplitudes, int max_qubits = kDefaultMaxQubits);

  int num_qubits() const { return num_qubits_; }
  int max_qubits() const { return max_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  Complex amplitude(std::size_t index) const { return amps_.at(index); }
  double norm_squared() const;

  void apply(const GateOp &gate);
  void apply_h(int q);
  void apply_x(int q);
  void apply_y(int q);
  void apply_z(int q);
  void apply_cx(int control, int target);
  void apply_cswap(int control, int a, int b);

  /// Loads `amplitudes` into `qubits` (qubits[i] is bit i of the register
  /// index). The named qubits must currently be |0...0>.
  void initialize_register(std::span<const int> qubits, std::span<const Complex> amplitudes);

  /// Projective Z measurement; collapses and renormalizes the state.
  int measure(int q, Rng &rng);
  /// Probability of reading 0 on qubit q.
  double prob_zero(int q) const;

  /// Removes qubits that sit in a definite computational basis state and
  /// compacts the remaining indices (relative order is preserved).
  void discard_measured(std::span<const int> qubits);

  /// Tensor product with `high`; this state's qubits keep indices
  /// [0, n) and `high`'s qubits land at [n, n + high.n).
  StateVector tensor(const StateVector &high) const;

 private:
  StateVector() = default;
  void check_qubit(int q) const;
  void check_distinct(std::span<const int> qs) const;

  int num_qubits_ = 0;
  int max_qubits_ = kDefaultMaxQubits;
  std::vector<Complex> amps_;
};

StateVector new_state(int num_qubits, int max_qubits = kDefaultMaxQubits);
StateVector apply_gate(StateVector state, const GateOp &gate);
int measure_qubit(StateVector &state, int q, Rng &rng);
double prob_zero(const StateVector &state, int q);
StateVector discard_measured(StateVector state, std::span<const int> qubits);

/// <a|b>.
Complex overlap(const StateVector &a, const StateVector &b);

// Pauli strings are encoded base 4, one digit per target in target order:
// 0 = I, 1 = X, 2 = Y, 3 = Z. Code 0 is the identity.
using PauliCode = std::uint32_t;

/// Draws the error for one noise location: 0 with probability 1 - p, otherwise
/// a uniform code in [1, 4^arity). Consumes no randomness when p == 0.
PauliCode sample_pauli_error(int arity, const NoiseModel &model, Rng &rng);
void apply_pauli_string(StateVector &state, std::span<const int> targets, PauliCode code);
/// Samples and applies one error; returns the applied code (0 if none).
PauliCode apply_pauli_noise(StateVector &state, std::span<const int> targets, const NoiseModel &model,
                            Rng &rng);

/// Supplies the Pauli error at each noise location of a circuit, in order.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual PauliCode draw(int arity) = 0;
};

/// Never injects an error.
class NoNoise final : public NoiseSource {
 public:
  PauliCode draw(int) override { return 0; }
};

/// Samples errors on demand from a model.
class LiveNoise final : public NoiseSource {
 public:
  LiveNoise(const NoiseModel &model, Rng &rng) : model_(model), rng_(rng) {}
  PauliCode draw(int arity) override { return sample_pauli_error(arity, model_, rng_); }

 private:
  NoiseModel model_;
  Rng &rng_;
};

/// Replays a pre-sampled error list; reading past the end is a contract violation.
class ScheduledNoise final : public NoiseSource {
 public:
  explicit ScheduledNoise(std::span<const PauliCode> codes) : codes_(codes) {}
  PauliCode draw(int arity) override;
  std::size_t consumed() const { return cursor_; }

 private:
  std::span<const PauliCode> codes_;
  std::size_t cursor_ = 0;
};

/// Applies `gate` then draws and applies the noise for its location.
void apply_noisy(StateVector &state, const GateOp &gate, NoiseSource &noise);
/// One noise location without a gate (used for conditional-correction slots).
void apply_noise_slot(StateVector &state, std::span<const int> targets, NoiseSource &noise);

}  // namespace qkdist
