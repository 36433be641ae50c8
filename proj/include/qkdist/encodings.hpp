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

// Quantum feature maps: classical vectors to normalized amplitude vectors whose
// inner products reproduce a kernel.
//
// Every map produced here is real-valued. Unnormalized kernels (linear,
// copies, polynomial) carry their pre-normalization Euclidean norm as
// `norm_factor`, so that k(x, y) = norm_factor(x) * norm_factor(y) * <x|y>.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qkdist/simcore.hpp"

namespace qkdist {

enum class FeatureMapKind { Linear, Copies, Poly, Rbf, Laplacian };

std::string to_string(FeatureMapKind kind);
FeatureMapKind feature_map_kind_from_string(const std::string &text);

struct FeatureMapSpec {
  FeatureMapKind kind = FeatureMapKind::Linear;
  int input_dim = 1;
  /// Tensor power (COPIES) or polynomial degree (POLY).
  int degree = 1;
  /// Polynomial scale and offset: (a x^T y + c)^d.
  double a = 1.0;
  double c = 0.0;
  /// RBF bandwidth: exp(-|x - y|^2 / (2 sigma^2)).
  double sigma = 1.0;
  /// Laplacian scale: exp(-|x - y|_1 / alpha).
  double alpha = 1.0;
  /// Number of random Fourier features D.
  int rff_samples = 1;

  void validate(int max_qubits = kDefaultMaxQubits) const;
  bool uses_rff() const { return kind == FeatureMapKind::Rbf || kind == FeatureMapKind::Laplacian; }
  /// Length of the encoded amplitude vector (always a power of two >= 2).
  std::size_t encoded_dim() const;
  int num_qubits() const;
};

/// Random Fourier feature draw shared by both clients. `weights` is D x N,
/// row-major; `phases` holds D offsets for the Laplacian map and is empty for RBF.
struct RffDraw {
  FeatureMapKind kind = FeatureMapKind::Rbf;
  int samples = 0;
  int input_dim = 0;
  std::vector<double> weights;
  std::vector<double> phases;

  std::span<const double> weight_row(int j) const {
    return {weights.data() + static_cast<std::size_t>(j) * input_dim, static_cast<std::size_t>(input_dim)};
  }
};

struct EncodedPoint {
  std::vector<double> amplitudes;
  double norm_factor = 1.0;
  FeatureMapSpec spec;

  int num_qubits() const;
  /// Amplitudes zero-padded to 2^qubits and converted for state injection.
  std::vector<Complex> register_amplitudes(int qubits) const;
};

std::size_t next_pow2(std::size_t n);
int ceil_log2(std::size_t n);
double dot(std::span<const double> x, std::span<const double> y);
double inner(const EncodedPoint &a, const EncodedPoint &b);

EncodedPoint encode_linear(std::span<const double> x);
EncodedPoint encode_copies(std::span<const double> x, int d);
EncodedPoint encode_poly(std::span<const double> x, double a, double c, int d, int max_qubits = kDefaultMaxQubits);
RffDraw sample_rff(const FeatureMapSpec &spec, std::uint64_t shared_seed);
EncodedPoint encode_rff(std::span<const double> x, const RffDraw &draw, const FeatureMapSpec &spec);

/// Dispatches on spec.kind. RFF kinds require `draw`.
EncodedPoint encode(std::span<const double> x, const FeatureMapSpec &spec, const RffDraw *draw = nullptr);

/// Closed-form kernel value the feature map targets.
double classical_kernel(std::span<const double> x, std::span<const double> y, const FeatureMapSpec &spec);

/// Multi-indices k = (k_1, ..., k_{N+1}) with |k| = d, lexicographically
/// decreasing. This order fixes the polynomial map's basis assignment.
std::vector<std::vector<int>> poly_multi_indices(int input_dim, int d);

/// Seeded real orthogonal map x -> signs .* x[permutation]. Both clients
/// derive the same map from their shared seed.
struct Obfuscation {
  std::vector<std::uint32_t> permutation;
  std::vector<std::int8_t> signs;
};

Obfuscation obfuscation_unitary(std::size_t dim, std::uint64_t shared_seed, std::uint64_t round);
std::vector<double> apply_obfuscation(std::span<const double> amplitudes, const Obfuscation &map);
EncodedPoint apply_obfuscation(const EncodedPoint &point, const Obfuscation &map);

}  // namespace qkdist
