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


#include "qkdist/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qkdist/error.hpp"

namespace qkdist {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_gram(const Eigen::MatrixXd &gram, std::size_t m) {
  if (gram.rows() != gram.cols() || static_cast<std::size_t>(gram.rows()) != m)
    throw ContractViolation("Gram matrix shape does not match the number of labels");
  if (!gram.allFinite()) throw ContractViolation("Gram matrix has non-finite entries");
}

}  // namespace

double BinarySvm::decision(const Eigen::Ref<const Eigen::VectorXd> &k_row) const {
  if (k_row.size() != alpha.size()) throw ContractViolation("kernel row length does not match the training set");
  double s = bias;
  for (std::size_t i : support) s += alpha(static_cast<Eigen::Index>(i)) * y(static_cast<Eigen::Index>(i)) *
                                      k_row(static_cast<Eigen::Index>(i));
  return s;
}

// Sequential minimal optimization with second-order working-set selection.
BinarySvm train_binary_svm(const Eigen::MatrixXd &gram, std::span<const int> labels, const SvmParams &params) {
  const std::size_t m = labels.size();
  check_gram(gram, m);
  if (!(params.C > 0.0)) throw ContractViolation("C must be positive");
  if (!(params.tolerance > 0.0)) throw ContractViolation("tolerance must be positive");
  if (params.max_passes < 1) throw ContractViolation("max_passes must be at least 1");
  bool has_pos = false, has_neg = false;
  for (int v : labels) {
    if (v == 1)
      has_pos = true;
    else if (v == -1)
      has_neg = true;
    else
      throw ContractViolation("binary labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw ContractViolation("training data contains a single class");

  const auto n = static_cast<Eigen::Index>(m);
  const double C = params.C;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  const auto q = [&](Eigen::Index i, Eigen::Index j) { return y(i) * y(j) * gram(i, j); };
  const auto at_upper = [&](Eigen::Index t) { return alpha(t) >= C; };
  const auto at_lower = [&](Eigen::Index t) { return alpha(t) <= 0.0; };

  const long max_iter = static_cast<long>(params.max_passes) * std::max<long>(static_cast<long>(m), 1);
  BinarySvm out;
  out.C = C;
  long iter = 0;
  double gap = kInf;
  for (; iter < max_iter; ++iter) {
    double gmax = -kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y(t) > 0) {
        if (!at_upper(t) && -grad(t) > gmax) gmax = -grad(t), i = t;
      } else {
        if (!at_lower(t) && grad(t) > gmax) gmax = grad(t), i = t;
      }
    }
    double gmax2 = -kInf;
    double obj_min = kInf;
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      double diff = 0.0;
      if (y(t) > 0) {
        if (at_lower(t)) continue;
        gmax2 = std::max(gmax2, grad(t));
        diff = gmax + grad(t);
      } else {
        if (at_upper(t)) continue;
        gmax2 = std::max(gmax2, -grad(t));
        diff = gmax - grad(t);
      }
      if (i >= 0 && diff > 0.0) {
        double quad = gram(i, i) + gram(t, t) - 2.0 * gram(i, t);
        if (quad <= 0.0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj < obj_min) obj_min = obj, j = t;
      }
    }
    gap = gmax + gmax2;
    if (i < 0 || j < 0 || gap < params.tolerance) break;

    const double old_i = alpha(i), old_j = alpha(j);
    if (y(i) != y(j)) {
      double quad = gram(i, i) + gram(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) alpha(j) = 0.0, alpha(i) = diff;
      } else {
        if (alpha(i) < 0.0) alpha(i) = 0.0, alpha(j) = -diff;
      }
      if (diff > 0.0) {
        if (alpha(i) > C) alpha(i) = C, alpha(j) = C - diff;
      } else {
        if (alpha(j) > C) alpha(j) = C, alpha(i) = C + diff;
      }
    } else {
      double quad = gram(i, i) + gram(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > C) {
        if (alpha(i) > C) alpha(i) = C, alpha(j) = sum - C;
      } else {
        if (alpha(j) < 0.0) alpha(j) = 0.0, alpha(i) = sum;
      }
      if (sum > C) {
        if (alpha(j) > C) alpha(j) = C, alpha(i) = sum - C;
      } else {
        if (alpha(i) < 0.0) alpha(i) = 0.0, alpha(j) = sum;
      }
    }
    const double di = alpha(i) - old_i, dj = alpha(j) - old_j;
    for (Eigen::Index t = 0; t < n; ++t) grad(t) += q(i, t) * di + q(j, t) * dj;
  }
  out.converged = gap < params.tolerance;
  out.kkt_gap = gap;
  out.iterations = iter;

  // Bias from the free vectors, or the midpoint of the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  long free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (at_upper(t)) {
      if (y(t) < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (y(t) > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++free_count;
      sum_free += yg;
    }
  }
  const double rho = free_count > 0 ? sum_free / static_cast<double>(free_count) : (ub + lb) / 2.0;
  out.bias = -rho;
  out.alpha = alpha;
  out.y = y;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha(t) > 0.0) out.support.push_back(static_cast<std::size_t>(t));
  out.objective = dual_objective(gram, labels, alpha);
  return out;
}

SvmModel train_svm(const Eigen::MatrixXd &gram, std::span<const int> labels, const SvmParams &params) {
  check_gram(gram, labels.size());
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw ContractViolation("training data contains a single class");
  SvmModel model;
  model.classes.assign(distinct.begin(), distinct.end());
  model.train_size = labels.size();
  std::vector<int> y(labels.size());
  const auto one_vs = [&](int positive) {
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == positive ? 1 : -1;
    model.machines.push_back(train_binary_svm(gram, y, params));
  };
  if (model.classes.size() == 2) {
    one_vs(model.classes[1]);
  } else {
    for (int c : model.classes) one_vs(c);
  }
  return model;
}

Eigen::MatrixXd decision_values(const SvmModel &model, const Eigen::MatrixXd &cross) {
  if (static_cast<std::size_t>(cross.cols()) != model.train_size)
    throw ContractViolation("cross kernel must have one column per training point");
  if (!cross.allFinite()) throw ContractViolation("cross kernel has non-finite entries");
  Eigen::MatrixXd out(cross.rows(), static_cast<Eigen::Index>(model.machines.size()));
  for (Eigen::Index r = 0; r < cross.rows(); ++r) {
    const Eigen::VectorXd row = cross.row(r).transpose();
    for (std::size_t k = 0; k < model.machines.size(); ++k)
      out(r, static_cast<Eigen::Index>(k)) = model.machines[k].decision(row);
  }
  return out;
}

std::vector<int> predict_svm(const SvmModel &model, const Eigen::MatrixXd &cross) {
  const Eigen::MatrixXd dv = decision_values(model, cross);
  std::vector<int> out(static_cast<std::size_t>(cross.rows()));
  for (Eigen::Index r = 0; r < dv.rows(); ++r) {
    if (model.classes.size() == 2) {
      out[static_cast<std::size_t>(r)] = dv(r, 0) >= 0.0 ? model.classes[1] : model.classes[0];
    } else {
      Eigen::Index best = 0;
      dv.row(r).maxCoeff(&best);
      out[static_cast<std::size_t>(r)] = model.classes[static_cast<std::size_t>(best)];
    }
  }
  return out;
}

double dual_objective(const Eigen::MatrixXd &gram, std::span<const int> y, const Eigen::VectorXd &alpha) {
  const auto n = alpha.size();
  Eigen::VectorXd ay(n);
  for (Eigen::Index i = 0; i < n; ++i) ay(i) = alpha(i) * y[static_cast<std::size_t>(i)];
  return alpha.sum() - 0.5 * ay.dot(gram * ay);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw ContractViolation("prediction and label counts differ");
  if (truth.empty()) throw ContractViolation("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace qkdist
