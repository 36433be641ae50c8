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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qkdist {

struct SvmParams {
  double C = 1.0;
  /// Stop when the maximal KKT violation drops below this.
  double tolerance = 1e-3;
  /// Iteration budget is max_passes * (number of training points).
  int max_passes = 200;
};

/// Soft-margin SVM on a precomputed kernel, labels in {-1, +1}.
struct BinarySvm {
  Eigen::VectorXd alpha;
  Eigen::VectorXd y;
  double bias = 0.0;
  double C = 1.0;
  std::vector<std::size_t> support;
  /// Dual objective sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij.
  double objective = 0.0;
  double kkt_gap = 0.0;
  long iterations = 0;
  bool converged = false;

  /// `k_row` holds K(x, x_i) for every training point i.
  double decision(const Eigen::Ref<const Eigen::VectorXd> &k_row) const;
};

BinarySvm train_binary_svm(const Eigen::MatrixXd &gram, std::span<const int> y, const SvmParams &params = {});

/// One machine for a binary problem (positive class = larger class id),
/// otherwise one-vs-rest with argmax over decision values.
struct SvmModel {
  std::vector<int> classes;
  std::vector<BinarySvm> machines;
  std::size_t train_size = 0;
};

SvmModel train_svm(const Eigen::MatrixXd &gram, std::span<const int> labels, const SvmParams &params = {});

/// `cross` is (test x train). Returns one column per machine.
Eigen::MatrixXd decision_values(const SvmModel &model, const Eigen::MatrixXd &cross);
std::vector<int> predict_svm(const SvmModel &model, const Eigen::MatrixXd &cross);

double dual_objective(const Eigen::MatrixXd &gram, std::span<const int> y, const Eigen::VectorXd &alpha);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

}  // namespace qkdist
