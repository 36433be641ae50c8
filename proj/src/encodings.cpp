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

#include "qkdist/encodings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qkdist/error.hpp"
#include "qkdist/rng.hpp"

namespace qkdist {

namespace {

double euclidean_norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void check_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw EncodingError("input vector contains non-finite values");
}

/// C(n, k) as a double; exact for the sizes that fit in a simulator.
double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

EncodedPoint normalized(std::vector<double> raw, std::size_t dim, const FeatureMapSpec &spec) {
  const double norm = euclidean_norm(raw);
  if (!(norm > 0.0)) throw EncodingError("cannot encode a vector with zero norm");
  EncodedPoint out;
  out.amplitudes.assign(dim, 0.0);
  for (std::size_t i = 0; i < raw.size(); ++i) out.amplitudes[i] = raw[i] / norm;
  out.norm_factor = norm;
  out.spec = spec;
  return out;
}

void enumerate_indices(int remaining_slots, int remaining_degree, std::vector<int> &prefix,
                       std::vector<std::vector<int>> &out) {
  if (remaining_slots == 1) {
    prefix.push_back(remaining_degree);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int k = remaining_degree; k >= 0; --k) {
    prefix.push_back(k);
    enumerate_indices(remaining_slots - 1, remaining_degree - k, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::string to_string(FeatureMapKind kind) {
  switch (kind) {
    case FeatureMapKind::Linear:
      return "linear";
    case FeatureMapKind::Copies:
      return "copies";
    case FeatureMapKind::Poly:
      return "poly";
    case FeatureMapKind::Rbf:
      return "rbf";
    case FeatureMapKind::Laplacian:
      return "laplacian";
  }
  return "linear";
}

FeatureMapKind feature_map_kind_from_string(const std::string &text) {
  if (text == "linear") return FeatureMapKind::Linear;
  if (text == "copies") return FeatureMapKind::Copies;
  if (text == "poly") return FeatureMapKind::Poly;
  if (text == "rbf") return FeatureMapKind::Rbf;
  if (text == "laplacian") return FeatureMapKind::Laplacian;
  throw ConfigError("unknown kernel '" + text + "'");
}

std::size_t next_pow2(std::size_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

int ceil_log2(std::size_t n) { return std::countr_zero(next_pow2(n)); }

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractViolation("dot product of vectors with different lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double inner(const EncodedPoint &a, const EncodedPoint &b) { return dot(a.amplitudes, b.amplitudes); }

void FeatureMapSpec::validate(int max_qubits) const {
  if (input_dim < 1) throw ContractViolation("input dimension must be >= 1");
  switch (kind) {
    case FeatureMapKind::Linear:
      break;
    case FeatureMapKind::Copies:
      if (degree < 1) throw ContractViolation("copies degree must be >= 1");
      break;
    case FeatureMapKind::Poly:
      if (degree < 1) throw ContractViolation("polynomial degree must be >= 1");
      if (!(a > 0.0)) throw ContractViolation("polynomial scale a must be positive");
      if (!(c >= 0.0)) throw ContractViolation("polynomial offset c must be non-negative");
      break;
    case FeatureMapKind::Rbf:
      if (!(sigma > 0.0)) throw ContractViolation("RBF sigma must be positive");
      if (rff_samples < 1) throw ContractViolation("RFF sample count must be >= 1");
      break;
    case FeatureMapKind::Laplacian:
      if (!(alpha > 0.0)) throw ContractViolation("Laplacian alpha must be positive");
      if (rff_samples < 1) throw ContractViolation("RFF sample count must be >= 1");
      break;
  }
  if (num_qubits() > max_qubits)
    throw CapacityError("feature map needs " + std::to_string(num_qubits()) + " qubits, capacity is " +
                        std::to_string(max_qubits));
}

int FeatureMapSpec::num_qubits() const {
  const auto base = static_cast<std::size_t>(std::max(1, ceil_log2(static_cast<std::size_t>(input_dim))));
  switch (kind) {
    case FeatureMapKind::Linear:
      return static_cast<int>(base);
    case FeatureMapKind::Copies:
      return static_cast<int>(base) * degree;
    case FeatureMapKind::Poly: {
      const double count = binomial(input_dim + degree, degree);
      if (count > 0x1.0p62) return 63;
      return std::max(1, ceil_log2(static_cast<std::size_t>(count)));
    }
    case FeatureMapKind::Rbf:
    case FeatureMapKind::Laplacian:
      return std::max(1, ceil_log2(2 * static_cast<std::size_t>(rff_samples)));
  }
  return static_cast<int>(base);
}

std::size_t FeatureMapSpec::encoded_dim() const {
  const int q = num_qubits();
  if (q >= 63) throw CapacityError("feature map dimension overflows");
  return std::size_t{1} << q;
}

int EncodedPoint::num_qubits() const { return std::countr_zero(amplitudes.size()); }

std::vector<Complex> EncodedPoint::register_amplitudes(int qubits) const {
  const std::size_t dim = std::size_t{1} << qubits;
  if (dim < amplitudes.size())
    throw CapacityError("encoding needs " + std::to_string(num_qubits()) + " qubits, register has " +
                        std::to_string(qubits));
  std::vector<Complex> out(dim, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < amplitudes.size(); ++i) out[i] = amplitudes[i];
  return out;
}

EncodedPoint encode_linear(std::span<const double> x) {
  check_finite(x);
  FeatureMapSpec spec;
  spec.kind = FeatureMapKind::Linear;
  spec.input_dim = static_cast<int>(x.size());
  return normalized({x.begin(), x.end()}, spec.encoded_dim(), spec);
}

EncodedPoint encode_copies(std::span<const double> x, int d) {
  check_finite(x);
  FeatureMapSpec spec;
  spec.kind = FeatureMapKind::Copies;
  spec.input_dim = static_cast<int>(x.size());
  spec.degree = d;
  spec.validate();
  const EncodedPoint single = encode_linear(x);
  std::vector<double> state = single.amplitudes;
  // Copy k occupies the k-th block of qubits, the first copy the lowest.
  for (int k = 1; k < d; ++k) {
    std::vector<double> next(state.size() * single.amplitudes.size());
    for (std::size_t hi = 0; hi < single.amplitudes.size(); ++hi)
      for (std::size_t lo = 0; lo < state.size(); ++lo) next[hi * state.size() + lo] = state[lo] * single.amplitudes[hi];
    state = std::move(next);
  }
  EncodedPoint out;
  out.amplitudes = std::move(state);
  out.norm_factor = std::pow(single.norm_factor, d);
  out.spec = spec;
  return out;
}

std::vector<std::vector<int>> poly_multi_indices(int input_dim, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  enumerate_indices(input_dim + 1, d, prefix, out);
  return out;
}

EncodedPoint encode_poly(std::span<const double> x, double a, double c, int d, int max_qubits) {
  check_finite(x);
  FeatureMapSpec spec;
  spec.kind = FeatureMapKind::Poly;
  spec.input_dim = static_cast<int>(x.size());
  spec.a = a;
  spec.c = c;
  spec.degree = d;
  spec.validate(max_qubits);

  // The scale sqrt(a) multiplies each x factor rather than each component.
  // With it on every component the inner product would be a (x^T y + c)^d;
  // placing it on the x factors yields (a x^T y + c)^d.
  const double sqrt_a = std::sqrt(a);
  const double sqrt_c = std::sqrt(c);
  const double log_d_fact = std::lgamma(d + 1.0);
  const auto indices = poly_multi_indices(spec.input_dim, d);
  std::vector<double> raw;
  raw.reserve(indices.size());
  for (const auto &k : indices) {
    double log_denominator = 0.0;
    for (int kj : k) log_denominator += std::lgamma(kj + 1.0);
    double value = std::exp(0.5 * (log_d_fact - log_denominator));
    for (int i = 0; i < spec.input_dim; ++i) value *= std::pow(sqrt_a * x[i], k[i]);
    value *= std::pow(sqrt_c, k[spec.input_dim]);
    raw.push_back(value);
  }
  return normalized(std::move(raw), spec.encoded_dim(), spec);
}

RffDraw sample_rff(const FeatureMapSpec &spec, std::uint64_t shared_seed) {
  if (!spec.uses_rff()) throw ContractViolation("random Fourier features need an RBF or Laplacian spec");
  spec.validate();
  Rng rng(derive_seed(shared_seed, "rff"));
  RffDraw draw;
  draw.kind = spec.kind;
  draw.samples = spec.rff_samples;
  draw.input_dim = spec.input_dim;
  const std::size_t count = static_cast<std::size_t>(spec.rff_samples) * spec.input_dim;
  draw.weights.resize(count);
  if (spec.kind == FeatureMapKind::Rbf) {
    const double scale = 1.0 / spec.sigma;
    for (auto &w : draw.weights) w = scale * rng.normal();
  } else {
    const double scale = 1.0 / spec.alpha;
    for (auto &w : draw.weights) w = rng.cauchy(scale);
    draw.phases.resize(spec.rff_samples);
    for (auto &p : draw.phases) p = 2.0 * std::numbers::pi * rng.uniform();
  }
  return draw;
}

EncodedPoint encode_rff(std::span<const double> x, const RffDraw &draw, const FeatureMapSpec &spec) {
  check_finite(x);
  if (draw.kind != spec.kind || draw.samples != spec.rff_samples || draw.input_dim != spec.input_dim)
    throw ContractViolation("RFF draw does not match the feature map spec");
  if (static_cast<int>(x.size()) != spec.input_dim) throw ContractViolation("input has the wrong dimension");
  EncodedPoint out;
  out.spec = spec;
  out.norm_factor = 1.0;
  out.amplitudes.assign(spec.encoded_dim(), 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(draw.samples));
  for (int j = 0; j < draw.samples; ++j) {
    double theta = dot(draw.weight_row(j), x);
    if (!draw.phases.empty()) theta += draw.phases[j];
    out.amplitudes[2 * j] = scale * std::cos(theta);
    out.amplitudes[2 * j + 1] = scale * std::sin(theta);
  }
  return out;
}

EncodedPoint encode(std::span<const double> x, const FeatureMapSpec &spec, const RffDraw *draw) {
  if (static_cast<int>(x.size()) != spec.input_dim) throw ContractViolation("input has the wrong dimension");
  switch (spec.kind) {
    case FeatureMapKind::Linear:
      return encode_linear(x);
    case FeatureMapKind::Copies:
      return encode_copies(x, spec.degree);
    case FeatureMapKind::Poly:
      return encode_poly(x, spec.a, spec.c, spec.degree);
    case FeatureMapKind::Rbf:
    case FeatureMapKind::Laplacian:
      if (draw == nullptr) throw ContractViolation("RFF encoding requires a draw");
      return encode_rff(x, *draw, spec);
  }
  throw ContractViolation("unknown feature map");
}

double classical_kernel(std::span<const double> x, std::span<const double> y, const FeatureMapSpec &spec) {
  if (x.size() != y.size()) throw ContractViolation("kernel arguments have different lengths");
  switch (spec.kind) {
    case FeatureMapKind::Linear:
      return dot(x, y);
    case FeatureMapKind::Copies:
      return std::pow(dot(x, y), spec.degree);
    case FeatureMapKind::Poly:
      return std::pow(spec.a * dot(x, y) + spec.c, spec.degree);
    case FeatureMapKind::Rbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
      return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
    }
    case FeatureMapKind::Laplacian: {
      double d1 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d1 += std::abs(x[i] - y[i]);
      return std::exp(-d1 / spec.alpha);
    }
  }
  return 0.0;
}

Obfuscation obfuscation_unitary(std::size_t dim, std::uint64_t shared_seed, std::uint64_t round) {
  if (dim < 1 || (dim & (dim - 1)) != 0) throw ContractViolation("obfuscation dimension must be a power of two");
  Rng rng(derive_seed(shared_seed, "obfuscation", {round, dim}));
  Obfuscation map;
  map.permutation.resize(dim);
  std::iota(map.permutation.begin(), map.permutation.end(), 0u);
  for (std::size_t i = dim - 1; i > 0; --i) std::swap(map.permutation[i], map.permutation[rng.uniform_index(i + 1)]);
  map.signs.resize(dim);
  for (auto &s : map.signs) s = (rng.next_u64() >> 63) ? -1 : 1;
  return map;
}

std::vector<double> apply_obfuscation(std::span<const double> amplitudes, const Obfuscation &map) {
  if (amplitudes.size() != map.permutation.size()) throw ContractViolation("obfuscation size mismatch");
  std::vector<double> out(amplitudes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = map.signs[i] * amplitudes[map.permutation[i]];
  return out;
}

EncodedPoint apply_obfuscation(const EncodedPoint &point, const Obfuscation &map) {
  EncodedPoint out = point;
  out.amplitudes = apply_obfuscation(point.amplitudes, map);
  return out;
}

}  // namespace qkdist
