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

#include "qkdist/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "qkdist/error.hpp"
#include "qkdist/rng.hpp"

namespace qkdist {

namespace {

bool all_zero(std::span<const PauliCode> codes) {
  return std::all_of(codes.begin(), codes.end(), [](PauliCode c) { return c == 0; });
}

// Noise locations for one client per shot: Bell preparation (H, CX) for each
// of its n pairs, then (CX, H, Z slot, X slot) per teleported qubit.
std::vector<PauliCode> sample_client_segment(int n, const NoiseModel &model, Rng &rng) {
  std::vector<PauliCode> codes;
  codes.reserve(6 * n);
  for (int i = 0; i < n; ++i) {
    codes.push_back(sample_pauli_error(1, model, rng));
    codes.push_back(sample_pauli_error(2, model, rng));
  }
  for (int i = 0; i < n; ++i) {
    codes.push_back(sample_pauli_error(2, model, rng));
    codes.push_back(sample_pauli_error(1, model, rng));
    codes.push_back(sample_pauli_error(1, model, rng));
    codes.push_back(sample_pauli_error(1, model, rng));
  }
  return codes;
}

// Swap test: H, n CSWAPs, H.
std::vector<PauliCode> sample_swap_segment(int n, const NoiseModel &model, Rng &rng) {
  std::vector<PauliCode> codes;
  codes.reserve(n + 2);
  codes.push_back(sample_pauli_error(1, model, rng));
  for (int i = 0; i < n; ++i) codes.push_back(sample_pauli_error(3, model, rng));
  codes.push_back(sample_pauli_error(1, model, rng));
  return codes;
}

int ancilla_bit(double p_zero, Rng &rng) { return rng.uniform() < p_zero ? 0 : 1; }

double probability_from_overlap(const StateVector &a, const StateVector &b) {
  return 0.5 + 0.5 * std::norm(overlap(a, b));
}

void run_swap_circuit(StateVector &state, int n, NoiseSource &noise) {
  const int ancilla = 2 * n;
  apply_noisy(state, GateOp::h(ancilla), noise);
  for (int i = 0; i < n; ++i) apply_noisy(state, GateOp::cswap(ancilla, i, n + i), noise);
  apply_noisy(state, GateOp::h(ancilla), noise);
}

StateVector swap_test_state(const StateVector &a, const StateVector &b) {
  if (a.num_qubits() != b.num_qubits()) throw ContractViolation("swap test registers differ in size");
  return a.tensor(b).tensor(StateVector(1, a.max_qubits()));
}

struct ClientRegisters {
  StateVector a;
  StateVector b;
};

ClientRegisters prepare_registers(const EncodedPoint &pa, const EncodedPoint &pb, int n, const SessionConfig &config) {
  std::vector<Complex> amps_a = pa.register_amplitudes(n);
  std::vector<Complex> amps_b = pb.register_amplitudes(n);
  if (config.obfuscate) {
    // Each client derives the map independently from the shared seed.
    const auto apply = [&](std::vector<Complex> &amps) {
      const Obfuscation map = obfuscation_unitary(amps.size(), config.shared_seed, config.round);
      std::vector<Complex> out(amps.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(map.signs[i]) * amps[map.permutation[i]];
      amps = std::move(out);
    };
    apply(amps_a);
    apply(amps_b);
  }
  return {StateVector::from_amplitudes(std::move(amps_a), config.max_qubits),
          StateVector::from_amplitudes(std::move(amps_b), config.max_qubits)};
}

std::vector<BellPair> client_pairs(int n, PartyId client, NoiseSource &noise) {
  std::vector<BellPair> pairs;
  pairs.reserve(n);
  for (int i = 0; i < n; ++i) pairs.push_back(make_bell_pair(client, noise));
  return pairs;
}

// The literal (6n + 1)-qubit circuit. Layout: A data [0, n), B data [n, 2n),
// A pair halves client [2n, 3n) / server [3n, 4n), B pair halves client
// [4n, 5n) / server [5n, 6n), ancilla 6n. Returns the noiseless ancilla
// probability when `measure` is false, otherwise the measured ancilla bit.
double full_circuit_execution(const ClientRegisters &regs, int n, NoiseSource &noise, Rng &rng, Rng *eavesdropper,
                              bool measure, std::vector<ClassicalMessage> *messages, int max_qubits) {
  StateVector state(6 * n + 1, max_qubits);
  std::vector<int> data_a(n), data_b(n);
  std::iota(data_a.begin(), data_a.end(), 0);
  std::iota(data_b.begin(), data_b.end(), n);
  state.initialize_register(data_a, regs.a.amplitudes());
  state.initialize_register(data_b, regs.b.amplitudes());

  struct Side {
    PartyId party;
    int data, client_half, server_half;
  };
  const Side sides[] = {{PartyId::ClientA, 0, 2 * n, 3 * n}, {PartyId::ClientB, n, 4 * n, 5 * n}};

  for (const Side &side : sides)
    for (int i = 0; i < n; ++i) {
      apply_noisy(state, GateOp::h(side.client_half + i), noise);
      apply_noisy(state, GateOp::cx(side.client_half + i, side.server_half + i), noise);
    }
  if (eavesdropper != nullptr)
    for (const Side &side : sides)
      for (int i = 0; i < n; ++i) simulate_intercept_resend(state, side.server_half + i, *eavesdropper);

  for (const Side &side : sides) {
    ClassicalMessage msg{side.party, PartyId::Server, {}};
    for (int i = 0; i < n; ++i) {
      const int d = side.data + i, c = side.client_half + i, s = side.server_half + i;
      apply_noisy(state, GateOp::cx(d, c), noise);
      apply_noisy(state, GateOp::h(d), noise);
      const int m_data = state.measure(d, rng);
      const int m_ent = state.measure(c, rng);
      msg.bits.push_back(static_cast<std::uint8_t>(m_data));
      msg.bits.push_back(static_cast<std::uint8_t>(m_ent));
      const int target[] = {s};
      if (m_data) state.apply_z(s);
      apply_noise_slot(state, target, noise);
      if (m_ent) state.apply_x(s);
      apply_noise_slot(state, target, noise);
    }
    if (messages != nullptr) messages->push_back(std::move(msg));
  }

  const int ancilla = 6 * n;
  apply_noisy(state, GateOp::h(ancilla), noise);
  for (int i = 0; i < n; ++i) apply_noisy(state, GateOp::cswap(ancilla, 3 * n + i, 5 * n + i), noise);
  apply_noisy(state, GateOp::h(ancilla), noise);
  if (!measure) return state.prob_zero(ancilla);
  return state.measure(ancilla, rng);
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace

std::string to_string(PartyId party) {
  switch (party) {
    case PartyId::Helper:
      return "helper";
    case PartyId::ClientA:
      return "client_a";
    case PartyId::ClientB:
      return "client_b";
    case PartyId::Server:
      return "server";
    case PartyId::Eavesdropper:
      return "eavesdropper";
  }
  return "unknown";
}

std::string to_string(ExecutionMode mode) { return mode == ExecutionMode::FullCircuit ? "full_circuit" : "streaming"; }

ExecutionMode execution_mode_from_string(const std::string &text) {
  if (text == "streaming") return ExecutionMode::Streaming;
  if (text == "full_circuit") return ExecutionMode::FullCircuit;
  throw ConfigError("unknown execution mode '" + text + "'");
}

void SessionConfig::validate(int n) const {
  if (n < 1) throw ContractViolation("register width must be >= 1");
  if (shots < 1) throw ContractViolation("shot count must be >= 1");
  noise.validate();
  if (live_qubits(n) > max_qubits)
    throw CapacityError(to_string(mode) + " execution at n = " + std::to_string(n) + " needs " +
                        std::to_string(live_qubits(n)) + " qubits, capacity is " + std::to_string(max_qubits));
}

std::string digest(const SessionConfig &config) {
  std::string text = std::to_string(config.qubits) + "|" + std::to_string(config.shots) + "|" +
                     to_string(config.noise.level) + "|" + std::to_string(config.noise.p1) + "|" +
                     std::to_string(config.noise.p2) + "|" + to_string(config.mode) + "|" +
                     std::to_string(config.obfuscate) + std::to_string(config.decoy) +
                     std::to_string(config.adversary) + std::to_string(config.per_shot_execution) +
                     std::to_string(config.fast_trajectories);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

BellPair make_bell_pair(PartyId client, NoiseSource &noise) {
  BellPair pair;
  pair.client = client;
  apply_noisy(pair.state, GateOp::h(0), noise);
  apply_noisy(pair.state, GateOp::cx(0, 1), noise);
  return pair;
}

std::vector<BellPair> prepare_bell_pairs(int n, NoiseSource &noise, int max_qubits) {
  if (n < 1) throw ContractViolation("need at least one qubit per client");
  if (2 * n + 3 > max_qubits)
    throw CapacityError("Bell pairs for n = " + std::to_string(n) + " exceed capacity " + std::to_string(max_qubits));
  std::vector<BellPair> pairs;
  pairs.reserve(2 * n);
  for (int i = 0; i < 2 * n; ++i) pairs.push_back(make_bell_pair(i < n ? PartyId::ClientA : PartyId::ClientB, noise));
  return pairs;
}

std::vector<BellPair> prepare_bell_pairs(int n) {
  NoNoise none;
  return prepare_bell_pairs(n, none);
}

int simulate_intercept_resend(StateVector &state, int qubit, Rng &rng) {
  // After the projective measurement the qubit is exactly the basis state the
  // attacker would prepare and forward.
  return state.measure(qubit, rng);
}

TeleportResult teleport_register(StateVector client_register, std::span<BellPair> pairs, PartyId sender, Rng &rng,
                                 NoiseSource &noise, Rng *eavesdropper) {
  const int n = client_register.num_qubits();
  if (static_cast<int>(pairs.size()) != n) throw ContractViolation("need exactly one Bell pair per register qubit");
  for (const auto &p : pairs)
    if (p.consumed) throw ProtocolViolation("Bell pair reused");

  ClassicalMessage msg{sender, PartyId::Server, {}};
  msg.bits.reserve(2 * n);
  StateVector state = std::move(client_register);
  // Invariant at the start of step i: remaining data qubits i..n-1 occupy
  // [0, n - i), received server qubits 0..i-1 follow them.
  for (int i = 0; i < n; ++i) {
    BellPair &pair = pairs[i];
    pair.consumed = true;
    const int width = state.num_qubits();
    state = state.tensor(pair.state);
    const int client_half = width, server_half = width + 1;
    if (eavesdropper != nullptr) simulate_intercept_resend(state, server_half, *eavesdropper);

    apply_noisy(state, GateOp::cx(0, client_half), noise);
    apply_noisy(state, GateOp::h(0), noise);
    const int m_data = state.measure(0, rng);
    const int m_ent = state.measure(client_half, rng);
    msg.bits.push_back(static_cast<std::uint8_t>(m_data));
    msg.bits.push_back(static_cast<std::uint8_t>(m_ent));

    const int target[] = {server_half};
    if (m_data) state.apply_z(server_half);
    apply_noise_slot(state, target, noise);
    if (m_ent) state.apply_x(server_half);
    apply_noise_slot(state, target, noise);

    const int measured[] = {0, client_half};
    state.discard_measured(measured);
  }
  return {std::move(state), std::move(msg)};
}

TeleportResult teleport_register(StateVector client_register, std::span<BellPair> pairs, Rng &rng) {
  NoNoise none;
  return teleport_register(std::move(client_register), pairs, PartyId::ClientA, rng, none);
}

int swap_test(const StateVector &a, const StateVector &b, NoiseSource &noise, Rng &rng) {
  StateVector state = swap_test_state(a, b);
  const int n = a.num_qubits();
  run_swap_circuit(state, n, noise);
  return state.measure(2 * n, rng);
}

int swap_test(const StateVector &a, const StateVector &b, const NoiseModel &noise, Rng &rng) {
  LiveNoise live(noise, rng);
  return swap_test(a, b, live, rng);
}

double swap_test_probability(const StateVector &a, const StateVector &b) {
  StateVector state = swap_test_state(a, b);
  const int n = a.num_qubits();
  NoNoise none;
  run_swap_circuit(state, n, none);
  return state.prob_zero(2 * n);
}

double estimate_overlap(std::span<const std::uint8_t> outcomes) {
  if (outcomes.empty()) throw ContractViolation("cannot estimate an overlap from zero shots");
  const auto zeros = std::count(outcomes.begin(), outcomes.end(), std::uint8_t{0});
  return 2.0 * static_cast<double>(zeros) / static_cast<double>(outcomes.size()) - 1.0;
}

ProtocolTranscript run_session(std::span<const double> x, std::span<const double> y, const FeatureMapSpec &spec,
                               const SessionConfig &config) {
  std::optional<RffDraw> draw_a, draw_b;
  if (spec.uses_rff()) {
    draw_a = sample_rff(spec, config.shared_seed);
    draw_b = sample_rff(spec, config.shared_seed);
  }
  const EncodedPoint a = encode(x, spec, draw_a ? &*draw_a : nullptr);
  const EncodedPoint b = encode(y, spec, draw_b ? &*draw_b : nullptr);
  return run_session_encoded(a, b, config);
}

ProtocolTranscript run_session_encoded(const EncodedPoint &a, const EncodedPoint &b, const SessionConfig &config) {
  const int n = config.qubits > 0 ? config.qubits : std::max(a.num_qubits(), b.num_qubits());
  config.validate(n);

  ProtocolTranscript t;
  t.session_id = config.session_id;
  t.config = config;
  t.qubits = n;
  t.norm_factor_a = a.norm_factor;
  t.norm_factor_b = b.norm_factor;
  if (config.decoy) {
    SessionConfig decoy_config = config;
    decoy_config.qubits = n;
    t.decoy_pass = run_decoy_session(decoy_config).pass;
  }

  const ClientRegisters regs = prepare_registers(a, b, n, config);
  Rng rng(derive_seed(config.session_seed, "session"));
  Rng eve(derive_seed(config.session_seed, "eavesdropper"));
  Rng *eavesdropper = config.adversary ? &eve : nullptr;
  const bool per_shot = config.per_shot_execution || config.noise.enabled() || config.adversary;
  t.shot_outcomes.reserve(config.shots);

  if (config.mode == ExecutionMode::FullCircuit) {
    NoNoise none;
    const double p_ref = full_circuit_execution(regs, n, none, rng, nullptr, false,
                                                per_shot ? nullptr : &t.messages, config.max_qubits);
    t.ancilla_probability = p_ref;
    if (!per_shot) {
      t.simulated_shots = 1;
      for (int s = 0; s < config.shots; ++s) t.shot_outcomes.push_back(static_cast<std::uint8_t>(ancilla_bit(p_ref, rng)));
    } else {
      LiveNoise live(config.noise, rng);
      for (int s = 0; s < config.shots; ++s) {
        const double bit = full_circuit_execution(regs, n, live, rng, eavesdropper, true,
                                                  s == 0 ? &t.messages : nullptr, config.max_qubits);
        t.shot_outcomes.push_back(static_cast<std::uint8_t>(bit));
      }
      t.simulated_shots = static_cast<std::size_t>(config.shots);
    }
  } else if (!per_shot) {
    NoNoise none;
    std::vector<BellPair> pairs = prepare_bell_pairs(n, none, config.max_qubits);
    std::span<BellPair> all(pairs);
    TeleportResult ra = teleport_register(regs.a, all.first(n), PartyId::ClientA, rng, none);
    TeleportResult rb = teleport_register(regs.b, all.subspan(n), PartyId::ClientB, rng, none);
    t.messages.push_back(std::move(ra.message));
    t.messages.push_back(std::move(rb.message));
    const double p = swap_test_probability(ra.server_register, rb.server_register);
    t.ancilla_probability = p;
    t.simulated_shots = 1;
    for (int s = 0; s < config.shots; ++s) t.shot_outcomes.push_back(static_cast<std::uint8_t>(ancilla_bit(p, rng)));
  } else {
    t.ancilla_probability = swap_test_probability(regs.a, regs.b);
    for (int s = 0; s < config.shots; ++s) {
      // Shot 0 is always simulated in full so the transcript carries real
      // teleportation bits. Later shots may skip error-free segments: an
      // error-free teleport returns the input register exactly, and an
      // error-free swap test reads 0 with probability (1 + |<a|b>|^2) / 2.
      const bool allow_skip = config.fast_trajectories && s > 0;
      const auto codes_a = sample_client_segment(n, config.noise, rng);
      const auto codes_b = sample_client_segment(n, config.noise, rng);
      const auto codes_s = sample_swap_segment(n, config.noise, rng);

      const auto teleport = [&](const StateVector &input, PartyId party,
                                std::span<const PauliCode> codes) -> std::optional<TeleportResult> {
        if (allow_skip && eavesdropper == nullptr && all_zero(codes)) return std::nullopt;
        ScheduledNoise schedule(codes);
        std::vector<BellPair> pairs = client_pairs(n, party, schedule);
        return teleport_register(input, pairs, party, rng, schedule, eavesdropper);
      };
      std::optional<TeleportResult> ra = teleport(regs.a, PartyId::ClientA, codes_a);
      std::optional<TeleportResult> rb = teleport(regs.b, PartyId::ClientB, codes_b);
      const StateVector &server_a = ra ? ra->server_register : regs.a;
      const StateVector &server_b = rb ? rb->server_register : regs.b;
      if (ra || rb) ++t.simulated_shots;
      if (s == 0) {
        t.messages.push_back(std::move(ra->message));
        t.messages.push_back(std::move(rb->message));
      }

      int bit;
      if (allow_skip && all_zero(codes_s)) {
        bit = ancilla_bit(probability_from_overlap(server_a, server_b), rng);
      } else {
        ScheduledNoise schedule(codes_s);
        bit = swap_test(server_a, server_b, schedule, rng);
        if (!(ra || rb)) ++t.simulated_shots;
      }
      t.shot_outcomes.push_back(static_cast<std::uint8_t>(bit));
    }
  }

  t.zeros = static_cast<std::size_t>(std::count(t.shot_outcomes.begin(), t.shot_outcomes.end(), std::uint8_t{0}));
  t.estimate = estimate_overlap(t.shot_outcomes);
  return t;
}

DecoyResult run_decoy_session(const SessionConfig &config) {
  const int n = config.qubits;
  if (n < 1) throw ContractViolation("decoy session needs an explicit register width");
  if (2 * n + 3 > config.max_qubits) throw CapacityError("decoy register exceeds capacity");

  DecoyResult result;
  Rng schedule(derive_seed(config.decoy_seed, "decoy-schedule", {config.round}));
  result.bases.resize(n);
  result.values.resize(n);
  std::vector<Complex> amps{1.0};
  for (int i = 0; i < n; ++i) {
    result.bases[i] = static_cast<std::uint8_t>(schedule.uniform_index(2));
    result.values[i] = static_cast<std::uint8_t>(schedule.uniform_index(2));
    std::array<Complex, 2> qubit{};
    if (result.bases[i] == 0) {
      qubit[result.values[i]] = 1.0;
    } else {
      const double s = 1.0 / std::sqrt(2.0);
      qubit = {s, result.values[i] ? -s : s};
    }
    std::vector<Complex> next(amps.size() * 2);
    for (std::size_t hi = 0; hi < 2; ++hi)
      for (std::size_t lo = 0; lo < amps.size(); ++lo) next[hi * amps.size() + lo] = amps[lo] * qubit[hi];
    amps = std::move(next);
  }

  Rng rng(derive_seed(config.session_seed, "decoy-session"));
  Rng eve(derive_seed(config.session_seed, "decoy-eavesdropper"));
  LiveNoise noise(config.noise, rng);
  std::vector<BellPair> pairs = client_pairs(n, PartyId::ClientA, noise);
  TeleportResult r = teleport_register(StateVector::from_amplitudes(std::move(amps), config.max_qubits), pairs,
                                       PartyId::ClientA, rng, noise, config.adversary ? &eve : nullptr);
  StateVector &state = r.server_register;
  // Preparation was H^b X^v |0>; undo it with X^v H^b.
  for (int i = 0; i < n; ++i) {
    if (result.bases[i]) apply_noisy(state, GateOp::h(i), noise);
    if (result.values[i]) apply_noisy(state, GateOp::x(i), noise);
  }
  result.outcomes.resize(n);
  for (int i = 0; i < n; ++i) {
    result.outcomes[i] = static_cast<std::uint8_t>(state.measure(i, rng));
    if (result.outcomes[i] != 0) result.pass = false;
  }
  return result;
}

double intercept_resend_detection_probability(int n) { return 1.0 - std::pow(0.75, n); }

std::string transcript_record(const ProtocolTranscript &t) {
  nlohmann::ordered_json j;
  j["session"] = t.session_id;
  j["config_digest"] = digest(t.config);
  j["qubits"] = t.qubits;
  j["mode"] = to_string(t.config.mode);
  j["noise"] = to_string(t.config.noise.level);
  j["adversary"] = t.config.adversary;
  for (const auto &m : t.messages) j["bits_" + to_string(m.sender)] = bits_to_string(m.bits);
  j["norm_factor_a"] = t.norm_factor_a;
  j["norm_factor_b"] = t.norm_factor_b;
  j["shots"] = t.shot_outcomes.size();
  j["zeros"] = t.zeros;
  j["estimate"] = t.estimate;
  if (t.decoy_pass)
    j["decoy"] = *t.decoy_pass ? "pass" : "fail";
  else
    j["decoy"] = nullptr;
  return j.dump();
}

void TranscriptSink::append(const ProtocolTranscript &transcript) {
  const std::string line = transcript_record(transcript);
  std::lock_guard lock(mutex_);
  out_ << line << '\n';
  ++records_;
}

std::size_t TranscriptSink::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

}  // namespace qkdist
