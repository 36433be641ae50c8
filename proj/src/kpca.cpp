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


#include "qkdist/kpca.hpp"

#include <algorithm>
#include <cmath>

#include "qkdist/error.hpp"

namespace qkdist {

Eigen::MatrixXd center_gram(const Eigen::MatrixXd &gram) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) throw ContractViolation("Gram matrix must be square and nonempty");
  const Eigen::VectorXd col = gram.colwise().mean().transpose();
  const double total = gram.mean();
  Eigen::MatrixXd c = gram;
  c.rowwise() -= col.transpose();
  c.colwise() -= col;
  c.array() += total;
  return c;
}

KpcaProjection fit_kpca(const Eigen::MatrixXd &gram, int k) {
  if (gram.rows() != gram.cols()) throw ContractViolation("Gram matrix must be square");
  const auto m = gram.rows();
  if (k < 1 || k >= m) throw ContractViolation("kPCA needs 1 <= k < number of training points");
  if (!gram.allFinite()) throw ContractViolation("Gram matrix has non-finite entries");

  const Eigen::MatrixXd centered = center_gram(gram);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (centered + centered.transpose()));
  KpcaProjection p;
  p.components = k;
  p.column_means = gram.colwise().mean().transpose();
  p.total_mean = gram.mean();
  p.eigenvalues.resize(k);
  p.coefficients = Eigen::MatrixXd::Zero(m, k);
  const double lmax = eig.eigenvalues()(m - 1);
  for (int c = 0; c < k; ++c) {
    const Eigen::Index src = m - 1 - c;
    const double lambda = eig.eigenvalues()(src);
    p.eigenvalues(c) = lambda;
    if (lambda > 1e-12 * std::max(lmax, 0.0) && lambda > 0.0) {
      Eigen::VectorXd v = eig.eigenvectors().col(src);
      // Fix the sign so the largest-magnitude entry is positive.
      Eigen::Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      if (v(arg) < 0) v = -v;
      p.coefficients.col(c) = v / std::sqrt(lambda);
    }
  }
  return p;
}

Eigen::MatrixXd KpcaProjection::transform(const Eigen::MatrixXd &cross) const {
  if (cross.cols() != column_means.size()) throw ContractViolation("cross kernel must have one column per training point");
  Eigen::MatrixXd c = cross;
  const Eigen::VectorXd row_means = cross.rowwise().mean();
  c.rowwise() -= column_means.transpose();
  c.colwise() -= row_means;
  c.array() += total_mean;
  return c * coefficients;
}

}  // namespace qkdist
