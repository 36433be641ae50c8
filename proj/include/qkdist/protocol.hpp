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

// Two-client distributed kernel evaluation.
//
// A helper distributes 2n Bell pairs (n per client, the other half of each to
// the server). Each client amplitude-encodes its point on n qubits, teleports
// the register to the server qubit by qubit and sends two classical bits per
// qubit. The server applies the Z/X corrections and runs a swap test between
// the two reconstructed registers, repeated once per shot.
//
// Noise locations: every gate is followed by one noise location on its
// qubits. The two teleportation corrections are fixed slots that carry a
// noise location whether or not the classical bit triggers the gate, so the
// number of locations in a shot does not depend on measurement outcomes.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkdist/encodings.hpp"
#include "qkdist/simcore.hpp"

namespace qkdist {

enum class PartyId { Helper, ClientA, ClientB, Server, Eavesdropper };
std::string to_string(PartyId party);

enum class ExecutionMode {
  /// Qubit-by-qubit teleportation with eager measurement and discard; at most
  /// 2n + 3 live qubits.
  Streaming,
  /// The literal (6n + 1)-qubit circuit. Only feasible for small n.
  FullCircuit,
};
std::string to_string(ExecutionMode mode);
ExecutionMode execution_mode_from_string(const std::string &text);

struct SessionConfig {
  /// Register width n per client; 0 means "as wide as the wider encoding".
  int qubits = 0;
  int shots = 1024;
  NoiseModel noise;
  /// Shared by the two clients only: RFF draws and obfuscation maps.
  std::uint64_t shared_seed = 0;
  /// Drives measurements, noise and shot sampling of this session.
  std::uint64_t session_seed = 0;
  /// Obfuscation round; both clients use the same value for one session.
  std::uint64_t round = 0;
  ExecutionMode mode = ExecutionMode::Streaming;
  bool obfuscate = true;
  /// Run a decoy exchange before the session and record its verdict.
  bool decoy = false;
  /// Decoy schedule seed, known to the clients and the server.
  std::uint64_t decoy_seed = 0;
  /// Intercept-resend eavesdropper on every in-flight Bell half.
  bool adversary = false;
  /// Re-execute the circuit for every shot even without noise.
  bool per_shot_execution = false;
  /// Within per-shot execution, skip simulating circuit segments whose
  /// sampled error pattern is empty (their outcome is known exactly).
  bool fast_trajectories = true;
  int max_qubits = kDefaultMaxQubits;
  std::string session_id;

  /// Peak simultaneously simulated qubits for a register width n.
  int live_qubits(int n) const { return mode == ExecutionMode::FullCircuit ? 6 * n + 1 : 2 * n + 3; }
  void validate(int n) const;
};

std::string digest(const SessionConfig &config);

struct BellPair {
  PartyId client = PartyId::ClientA;
  PartyId server = PartyId::Server;
  /// Qubit 0 is the client's half, qubit 1 the server's.
  StateVector state{2};
  bool consumed = false;
};

BellPair make_bell_pair(PartyId client, NoiseSource &noise);
/// 2n pairs: the first n shared with client A, the rest with client B.
std::vector<BellPair> prepare_bell_pairs(int n, NoiseSource &noise, int max_qubits = kDefaultMaxQubits);
std::vector<BellPair> prepare_bell_pairs(int n);

struct ClassicalMessage {
  PartyId sender = PartyId::ClientA;
  PartyId receiver = PartyId::Server;
  /// Two bits per teleported qubit: (data-qubit outcome, entangled-qubit outcome).
  std::vector<std::uint8_t> bits;
};

struct TeleportResult {
  StateVector server_register{1};
  ClassicalMessage message;
};

/// Intercept-resend on one in-flight qubit: measure it in the computational
/// basis and forward a fresh basis state with the observed value. Returns the
/// observed bit.
int simulate_intercept_resend(StateVector &state, int qubit, Rng &rng);

/// Teleports `client_register` through `pairs` (one per qubit). The returned
/// register holds the client's state (up to global phase when noiseless).
/// `eavesdropper`, when given, intercepts every server half before use.
TeleportResult teleport_register(StateVector client_register, std::span<BellPair> pairs, PartyId sender, Rng &rng,
                                 NoiseSource &noise, Rng *eavesdropper = nullptr);
TeleportResult teleport_register(StateVector client_register, std::span<BellPair> pairs, Rng &rng);

/// One swap-test shot; returns the ancilla bit.
int swap_test(const StateVector &a, const StateVector &b, NoiseSource &noise, Rng &rng);
int swap_test(const StateVector &a, const StateVector &b, const NoiseModel &noise, Rng &rng);
/// Noiseless probability that the swap-test ancilla reads 0, evaluated by
/// running the circuit.
double swap_test_probability(const StateVector &a, const StateVector &b);

/// 2 * zeros / p - 1; unbiased for |<a|b>|^2 and may be negative.
double estimate_overlap(std::span<const std::uint8_t> outcomes);

struct ProtocolTranscript {
  std::string session_id;
  SessionConfig config;
  int qubits = 0;
  /// Client A -> server, then client B -> server.
  std::vector<ClassicalMessage> messages;
  /// Sent classically alongside the teleportation bits.
  double norm_factor_a = 1.0;
  double norm_factor_b = 1.0;
  std::vector<std::uint8_t> shot_outcomes;
  std::size_t zeros = 0;
  double estimate = 0.0;
  /// Noiseless probability of reading 0 on the ancilla for this pair.
  double ancilla_probability = 0.0;
  std::optional<bool> decoy_pass;
  /// Shots that required an explicit circuit simulation.
  std::size_t simulated_shots = 0;
};

/// Full session: each client regenerates the shared draws from the shared
/// seed and encodes its own point, then the protocol runs.
ProtocolTranscript run_session(std::span<const double> x, std::span<const double> y, const FeatureMapSpec &spec,
                               const SessionConfig &config);
/// Session on points that are already encoded.
ProtocolTranscript run_session_encoded(const EncodedPoint &a, const EncodedPoint &b, const SessionConfig &config);

struct DecoyResult {
  bool pass = true;
  /// Per-qubit decoy basis (0 = Z, 1 = X) and value.
  std::vector<std::uint8_t> bases;
  std::vector<std::uint8_t> values;
  std::vector<std::uint8_t> outcomes;
};

/// Teleports a seeded random BB84-style product state; the server undoes the
/// known preparation and passes iff every qubit reads 0.
DecoyResult run_decoy_session(const SessionConfig &config);

/// Detection probability of an intercept-resend attacker on one noiseless
/// n-qubit decoy: each X-basis qubit fails with probability 1/2, so each qubit
/// detects with 1/4.
double intercept_resend_detection_probability(int n);

/// One JSON object per line; see docs/formats.md.
std::string transcript_record(const ProtocolTranscript &transcript);

/// Thread-safe line-delimited transcript writer.
class TranscriptSink {
 public:
  explicit TranscriptSink(std::ostream &out) : out_(out) {}
  void append(const ProtocolTranscript &transcript);
  std::size_t records() const;

 private:
  mutable std::mutex mutex_;
  std::ostream &out_;
  std::size_t records_ = 0;
};

}  // namespace qkdist
