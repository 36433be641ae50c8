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

#include "qkdist/gram.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "qkdist/error.hpp"
#include "qkdist/rng.hpp"

namespace qkdist {

namespace {

std::vector<double> row_of(const Eigen::MatrixXd &m, Eigen::Index i) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t m) { return i * m - i * (i + 1) / 2 + (j - i - 1); }

// Runs body(i) for i in [0, count) on `workers` threads; rethrows the first
// exception after all workers finish.
template <typename Body>
void parallel_rows(std::size_t count, int workers, Body body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string to_string(GramSource source) {
  switch (source) {
    case GramSource::ExactClassical:
      return "classical";
    case GramSource::ExactQuantum:
      return "exact_quantum";
    case GramSource::Protocol:
      return "protocol";
  }
  return "classical";
}

GramSource gram_source_from_string(const std::string &text) {
  if (text == "classical") return GramSource::ExactClassical;
  if (text == "exact_quantum") return GramSource::ExactQuantum;
  if (text == "protocol") return GramSource::Protocol;
  throw ConfigError("unknown mode '" + text + "' (expected classical, exact_quantum or protocol)");
}

std::string to_string(KernelConvention convention) {
  return convention == KernelConvention::Fidelity ? "fidelity" : "sqrt_fidelity";
}

KernelConvention kernel_convention_from_string(const std::string &text) {
  if (text == "sqrt_fidelity") return KernelConvention::SqrtFidelity;
  if (text == "fidelity") return KernelConvention::Fidelity;
  throw ConfigError("unknown kernel convention '" + text + "'");
}

double fidelity_to_kernel(double fidelity, double norm_a, double norm_b, KernelConvention convention) {
  const double f = std::clamp(fidelity, 0.0, 1.0);
  if (convention == KernelConvention::Fidelity) return f;
  return norm_a * norm_b * std::sqrt(f);
}

GramEstimate assemble_gram(const Eigen::MatrixXd &points, const FeatureMapSpec &spec_in, const GramOptions &options) {
  const auto m = static_cast<std::size_t>(points.rows());
  FeatureMapSpec spec = spec_in;
  spec.input_dim = static_cast<int>(points.cols());
  spec.validate(options.session.max_qubits);
  if (options.skip_pairs_within != nullptr && options.skip_pairs_within->size() != m)
    throw ContractViolation("skip mask length must equal the number of points");

  GramEstimate g;
  g.source = options.source;
  g.convention = options.convention;
  g.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  if (options.source == GramSource::Protocol) {
    g.shots = options.session.shots;
    g.noise = options.session.noise.level;
  }

  std::vector<std::vector<double>> rows(m);
  for (std::size_t i = 0; i < m; ++i) rows[i] = row_of(points, static_cast<Eigen::Index>(i));

  const std::uint64_t shared_seed = derive_seed(options.master_seed, "shared-seed");
  std::vector<EncodedPoint> encoded;
  if (options.source != GramSource::ExactClassical) {
    std::optional<RffDraw> draw;
    if (spec.uses_rff()) draw = sample_rff(spec, shared_seed);
    encoded.reserve(m);
    for (std::size_t i = 0; i < m; ++i) encoded.push_back(encode(rows[i], spec, draw ? &*draw : nullptr));
  }

  std::atomic<std::size_t> sessions{0}, decoys{0}, decoy_failures{0};
  const auto entry = [&](std::size_t i, std::size_t j) -> double {
    switch (options.source) {
      case GramSource::ExactClassical:
        return classical_kernel(rows[i], rows[j], spec);
      case GramSource::ExactQuantum: {
        const double ov = inner(encoded[i], encoded[j]);
        return fidelity_to_kernel(ov * ov, encoded[i].norm_factor, encoded[j].norm_factor, options.convention);
      }
      case GramSource::Protocol: {
        if (options.skip_pairs_within != nullptr && (*options.skip_pairs_within)[i] && (*options.skip_pairs_within)[j])
          return 0.0;
        SessionConfig cfg = options.session;
        cfg.shared_seed = shared_seed;
        cfg.session_seed = derive_seed(options.master_seed, "session", {options.stream, i, j});
        cfg.round = derive_seed(options.master_seed, "round", {options.stream, i, j});
        cfg.decoy_seed = derive_seed(options.master_seed, "decoy-schedule");
        cfg.decoy = options.decoy_interval > 0 && pair_index(i, j, m) % static_cast<std::size_t>(options.decoy_interval) == 0;
        cfg.session_id = std::to_string(options.stream) + ":" + std::to_string(i) + ":" + std::to_string(j);
        const ProtocolTranscript t = run_session_encoded(encoded[i], encoded[j], cfg);
        ++sessions;
        if (t.decoy_pass) {
          ++decoys;
          if (!*t.decoy_pass) ++decoy_failures;
        }
        if (options.sink != nullptr) options.sink->append(t);
        return fidelity_to_kernel(t.estimate, t.norm_factor_a, t.norm_factor_b, options.convention);
      }
    }
    return 0.0;
  };

  parallel_rows(m, options.workers, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (options.source == GramSource::ExactClassical)
      g.values(ii, ii) = classical_kernel(rows[i], rows[i], spec);
    else
      g.values(ii, ii) = fidelity_to_kernel(1.0, encoded[i].norm_factor, encoded[i].norm_factor, options.convention);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = entry(i, j);
      g.values(ii, static_cast<Eigen::Index>(j)) = v;
      g.values(static_cast<Eigen::Index>(j), ii) = v;
    }
  });

  if (options.normalize) {
    const Eigen::VectorXd d = g.values.diagonal();
    for (Eigen::Index i = 0; i < g.values.rows(); ++i)
      for (Eigen::Index j = 0; j < g.values.cols(); ++j) {
        const double denom = std::sqrt(d(i) * d(j));
        g.values(i, j) = denom > 0.0 ? g.values(i, j) / denom : 0.0;
      }
  }
  g.sessions = sessions;
  g.decoy_sessions = decoys;
  g.decoy_failures = decoy_failures;
  return g;
}

GramEstimate psd_repair(const GramEstimate &gram) {
  const Eigen::MatrixXd &k = gram.values;
  if (k.rows() != k.cols()) throw ContractViolation("Gram matrix must be square");
  if (!k.allFinite()) throw ContractViolation("Gram matrix has non-finite entries");
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw ContractViolation("Gram matrix is not symmetric");

  GramEstimate out = gram;
  if (k.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  const Eigen::VectorXd &lambda = eig.eigenvalues();
  // Eigenvalues within rounding of zero do not count as negative.
  const double floor = -1e-12 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() >= floor) return out;

  double clipped = 0.0;
  Eigen::VectorXd kept(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < 0.0) clipped += -lambda(i);
    kept(i) = std::max(lambda(i), 0.0);
  }
  Eigen::MatrixXd a = eig.eigenvectors() * kept.asDiagonal() * eig.eigenvectors().transpose();

  const Eigen::VectorXd target = k.diagonal();
  Eigen::VectorXd scale(target.size());
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (a(i, i) > 1e-300 && target(i) >= 0.0) {
      scale(i) = std::sqrt(target(i) / a(i, i));
    } else {
      // The projection removed this point entirely; keep it as an isolated
      // point with its analytic self-kernel.
      scale(i) = 0.0;
    }
  }
  Eigen::MatrixXd repaired = scale.asDiagonal() * a * scale.asDiagonal();
  for (Eigen::Index i = 0; i < target.size(); ++i) repaired(i, i) = target(i);
  out.values = 0.5 * (repaired + repaired.transpose());
  out.repair = PsdRepair::Clipped;
  out.clipped_mass = clipped;
  return out;
}

void export_gram_csv(const GramEstimate &gram, std::ostream &out) {
  out << "#format=qkdist-gram-v1\n";
  out << "#size=" << gram.size() << "\n";
  out << "#source=" << to_string(gram.source) << "\n";
  out << "#convention=" << to_string(gram.convention) << "\n";
  out << "#shots=" << gram.shots << "\n";
  out << "#noise=" << to_string(gram.noise) << "\n";
  out << "#repair=" << (gram.repair == PsdRepair::Clipped ? "clipped" : "none") << "\n";
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", gram.clipped_mass);
    out << "#clipped_mass=" << buf << "\n";
  }
  out << "#sessions=" << gram.sessions << "\n";
  out << "row";
  for (std::size_t j = 0; j < gram.size(); ++j) out << ',' << j;
  out << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < gram.values.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < gram.values.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", gram.values(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

GramEstimate import_gram_csv(std::istream &in) {
  std::map<std::string, std::string> meta;
  std::string line;
  while (in.peek() == '#' && std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("malformed Gram metadata line: " + line);
    meta[line.substr(1, eq - 1)] = line.substr(eq + 1);
  }
  if (meta["format"] != "qkdist-gram-v1") throw DataError("not a qkdist Gram file");
  const std::size_t m = std::stoul(meta.at("size"));
  if (!std::getline(in, line)) throw DataError("Gram file has no header row");

  GramEstimate g;
  g.source = gram_source_from_string(meta.at("source"));
  g.convention = kernel_convention_from_string(meta.at("convention"));
  g.shots = std::stoi(meta.at("shots"));
  g.noise = noise_level_from_string(meta.at("noise"));
  g.repair = meta.at("repair") == "clipped" ? PsdRepair::Clipped : PsdRepair::None;
  g.clipped_mass = std::stod(meta.at("clipped_mass"));
  g.sessions = std::stoul(meta.at("sessions"));
  g.values.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::getline(in, line)) throw DataError("Gram file is truncated");
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::getline(ss, cell, ',')) throw DataError("Gram row " + std::to_string(i) + " is short");
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::stod(cell);
    }
  }
  return g;
}

}  // namespace qkdist
