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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qkdist/data.hpp"
#include "qkdist/encodings.hpp"
#include "qkdist/gram.hpp"
#include "qkdist/protocol.hpp"
#include "qkdist/svm.hpp"

namespace qkdist {

/// Test indices for each fold. Every class is shuffled with its own seeded
/// stream and dealt round-robin, so per-fold class counts differ from the
/// global proportion by at most one sample.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed);

struct CvReport {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
  /// Population standard deviation over folds.
  double stddev = 0.0;
  std::string config_digest;
  std::size_t samples = 0;
  std::size_t sessions = 0;
  double clipped_mass = 0.0;
};

/// Evaluates one fold: (train indices, test indices, fold number) -> accuracy.
using FoldEvaluator = std::function<double(std::span<const std::size_t>, std::span<const std::size_t>, int)>;

CvReport cross_validate(std::span<const int> labels, int folds, std::uint64_t seed, const FoldEvaluator &evaluate);

enum class ModelKind { Svm, KpcaSvm };
std::string to_string(ModelKind model);
ModelKind model_kind_from_string(const std::string &text);

struct PipelineConfig {
  /// input_dim is taken from the dataset.
  FeatureMapSpec kernel;
  GramSource mode = GramSource::ExactClassical;
  KernelConvention convention = KernelConvention::SqrtFidelity;
  /// Session template for protocol mode (shots, noise, execution mode, ...).
  SessionConfig session;
  ModelKind model = ModelKind::Svm;
  int kpca_components = 5;
  SvmParams svm;
  int workers = 1;
  int decoy_interval = 0;
  bool normalize = false;
  /// Apply psd_repair to every training Gram.
  bool repair = true;
  TranscriptSink *sink = nullptr;
};

/// Canonical JSON text of everything that affects results.
std::string describe(const PipelineConfig &config);

/// Per fold: min-max scaling fit on the training part, Gram over train and
/// test points (protocol sessions between two test points are skipped),
/// repair of the training block, then SVM or kPCA followed by a linear SVM.
CvReport stratified_cv(const Dataset &dataset, const PipelineConfig &config, int folds = 5, std::uint64_t seed = 0);

}  // namespace qkdist
