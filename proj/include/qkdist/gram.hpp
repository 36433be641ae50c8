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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "qkdist/encodings.hpp"
#include "qkdist/protocol.hpp"

namespace qkdist {

enum class GramSource {
  /// Closed-form kernel.
  ExactClassical,
  /// Exact overlaps of the encoded states.
  ExactQuantum,
  /// Swap-test estimates from full protocol sessions.
  Protocol,
};
std::string to_string(GramSource source);
GramSource gram_source_from_string(const std::string &text);

/// How a fidelity F = |<x|y>|^2 (exact or estimated) becomes a kernel value.
///
/// The swap test only sees |<x|y>|^2, so the sign of the overlap is lost. On
/// min-max scaled data every amplitude encoding has nonnegative overlaps, and
/// sqrt(F) * nf(x) * nf(y) recovers the target kernel exactly.
enum class KernelConvention {
  /// nf(x) * nf(y) * sqrt(clip(F, 0, 1)).
  SqrtFidelity,
  /// clip(F, 0, 1), no norm rescaling.
  Fidelity,
};
std::string to_string(KernelConvention convention);
KernelConvention kernel_convention_from_string(const std::string &text);

enum class PsdRepair { None, Clipped };

struct GramEstimate {
  Eigen::MatrixXd values;
  GramSource source = GramSource::ExactClassical;
  KernelConvention convention = KernelConvention::SqrtFidelity;
  int shots = 0;
  NoiseLevel noise = NoiseLevel::None;
  PsdRepair repair = PsdRepair::None;
  /// Sum of |negative eigenvalues| removed by psd_repair.
  double clipped_mass = 0.0;
  std::size_t sessions = 0;
  std::size_t decoy_sessions = 0;
  std::size_t decoy_failures = 0;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

struct GramOptions {
  GramSource source = GramSource::ExactClassical;
  KernelConvention convention = KernelConvention::SqrtFidelity;
  /// Template for every protocol session; seeds are overwritten per pair.
  SessionConfig session;
  std::uint64_t master_seed = 0;
  /// Extra seed component separating independent assemblies (e.g. CV folds).
  std::uint64_t stream = 0;
  int workers = 1;
  /// Every k-th session is preceded by a decoy exchange; 0 disables decoys.
  int decoy_interval = 0;
  /// Divide by sqrt(K_ii K_jj) after assembly.
  bool normalize = false;
  /// Skip protocol sessions for pairs where both points are flagged; their
  /// entries are left at 0. Used to avoid test-test pairs in CV.
  const std::vector<bool> *skip_pairs_within = nullptr;
  TranscriptSink *sink = nullptr;
};

/// Maps a fidelity to a kernel value under `convention`.
double fidelity_to_kernel(double fidelity, double norm_a, double norm_b, KernelConvention convention);

/// Rows of `points` are samples. Diagonal entries are set analytically; the
/// result is exactly symmetric.
GramEstimate assemble_gram(const Eigen::MatrixXd &points, const FeatureMapSpec &spec, const GramOptions &options);

/// Clips negative eigenvalues to zero, then restores the original diagonal
/// by a diagonal congruence D K D (which keeps the matrix PSD). Input whose
/// smallest eigenvalue is >= -1e-12 * max(1, |lambda|_max) counts as PSD and
/// is returned unchanged.
GramEstimate psd_repair(const GramEstimate &gram);

/// Headered CSV: "#key=value" metadata lines, a column header, then rows.
void export_gram_csv(const GramEstimate &gram, std::ostream &out);
GramEstimate import_gram_csv(std::istream &in);

}  // namespace qkdist
