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

#include <Eigen/Dense>

namespace qkdist {

/// Kernel PCA fitted on a training Gram matrix.
struct KpcaProjection {
  int components = 0;
  /// Top eigenvalues of the centered Gram, descending.
  Eigen::VectorXd eigenvalues;
  /// m x k; column c is v_c / sqrt(lambda_c).
  Eigen::MatrixXd coefficients;
  Eigen::VectorXd column_means;
  double total_mean = 0.0;

  /// `cross` is (points x train) kernel values; returns (points x k)
  /// coordinates. Passing the training Gram reproduces the training scores.
  Eigen::MatrixXd transform(const Eigen::MatrixXd &cross) const;
};

/// Requires 1 <= k < m. Components with eigenvalue <= 1e-12 * lambda_max
/// get zero coefficients.
KpcaProjection fit_kpca(const Eigen::MatrixXd &gram, int k);

/// Double centering H K H with H = I - 11^T / m.
Eigen::MatrixXd center_gram(const Eigen::MatrixXd &gram);

}  // namespace qkdist
