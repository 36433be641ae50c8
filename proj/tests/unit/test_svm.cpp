#include <doctest.h>

#include <cmath>

#include "qkdist/error.hpp"
#include "qkdist/rng.hpp"
#include "qkdist/svm.hpp"
#include "svm_oracle.hpp"

using namespace qkdist;

namespace {

Eigen::MatrixXd linear_gram(const Eigen::MatrixXd &x) { return x * x.transpose(); }

}  // namespace

TEST_CASE("separable points on a line are fit exactly") {
  Eigen::MatrixXd x(4, 1);
  x << -2, -1, 1, 2;
  const std::vector<int> labels{0, 0, 1, 1};
  const Eigen::MatrixXd k = linear_gram(x);
  const SvmModel m = train_svm(k, labels);
  CHECK(predict_svm(m, k) == labels);
  CHECK(m.machines.size() == 1);
  CHECK(m.machines[0].converged);
}

TEST_CASE("dual feasibility at convergence") {
  Rng rng(1);
  Eigen::MatrixXd x(30, 3);
  std::vector<int> labels(30);
  for (int i = 0; i < 30; ++i) {
    labels[i] = i % 2;
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal() + (labels[i] ? 0.8 : -0.8);
  }
  SvmParams p;
  p.C = 0.5;
  const SvmModel m = train_svm(linear_gram(x), labels, p);
  const BinarySvm &s = m.machines[0];
  CHECK(s.converged);
  CHECK(s.kkt_gap < p.tolerance);
  CHECK((s.alpha.array() >= 0.0).all());
  CHECK((s.alpha.array() <= p.C).all());
  CHECK(std::abs(s.alpha.dot(s.y)) < 1e-8);
}

TEST_CASE("objective matches the brute-force dual oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd x(6, 2);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 2; ++j) x(i, j) = rng.normal();
    std::vector<int> y{1, -1, 1, -1, 1, -1};
    const Eigen::MatrixXd k = linear_gram(x);
    SvmParams p;
    p.tolerance = 1e-6;
    const BinarySvm s = train_binary_svm(k, y, p);
    Eigen::VectorXd yv(6);
    for (int i = 0; i < 6; ++i) yv(i) = y[i];
    const auto ref = oracle::brute_force_dual(k, yv, p.C);
    CHECK(std::abs(s.objective - ref.objective) < 1e-4);
  }
}

TEST_CASE("support vector rows predict their own labels on separable data") {
  Eigen::MatrixXd x(6, 2);
  x << 0, 0, 0, 1, 1, 0, 3, 3, 3, 4, 4, 3;
  const std::vector<int> labels{0, 0, 0, 1, 1, 1};
  const Eigen::MatrixXd k = linear_gram(x);
  SvmParams p;
  p.C = 100.0;
  const SvmModel m = train_svm(k, labels, p);
  const auto pred = predict_svm(m, k);
  for (std::size_t i : m.machines[0].support) CHECK(pred[i] == labels[i]);
}

TEST_CASE("all-zero kernel row yields the sign of the bias") {
  Eigen::MatrixXd x(4, 1);
  x << -2, -1, 1, 3;
  const std::vector<int> labels{0, 0, 1, 1};
  const SvmModel m = train_svm(linear_gram(x), labels);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 4);
  const double b = m.machines[0].bias;
  CHECK(decision_values(m, zero)(0, 0) == doctest::Approx(b));
  CHECK(predict_svm(m, zero)[0] == (b >= 0 ? 1 : 0));
}

TEST_CASE("one-vs-rest prediction is the argmax of the binary scores") {
  Eigen::MatrixXd x(6, 2);
  x << 0, 5, 0.5, 5, 5, 0, 5, 0.5, -5, -5, -5, -4.5;
  const std::vector<int> labels{0, 0, 1, 1, 2, 2};
  const Eigen::MatrixXd k = linear_gram(x);
  const SvmModel m = train_svm(k, labels);
  REQUIRE(m.machines.size() == 3);
  const Eigen::MatrixXd dv = decision_values(m, k);
  const auto pred = predict_svm(m, k);
  for (int r = 0; r < 6; ++r) {
    int best = 0;
    for (int c = 1; c < 3; ++c)
      if (dv(r, c) > dv(r, best)) best = c;
    CHECK(pred[r] == best);
  }
  CHECK(pred == labels);
}

TEST_CASE("training is deterministic") {
  Rng rng(3);
  Eigen::MatrixXd x(20, 2);
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) {
    labels[i] = i % 3;
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
  }
  const Eigen::MatrixXd k = linear_gram(x);
  const SvmModel a = train_svm(k, labels), b = train_svm(k, labels);
  for (std::size_t c = 0; c < a.machines.size(); ++c) {
    CHECK(a.machines[c].alpha == b.machines[c].alpha);
    CHECK(a.machines[c].bias == b.machines[c].bias);
  }
}

TEST_CASE("error cases") {
  const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
  const std::vector<int> one_class{1, 1, 1};
  CHECK_THROWS_AS(train_svm(k, one_class), ContractViolation);
  Eigen::MatrixXd bad = k;
  bad(0, 1) = std::nan("");
  const std::vector<int> labels{0, 1, 0};
  CHECK_THROWS_AS(train_svm(bad, labels), ContractViolation);
  const SvmModel m = train_svm(k, labels);
  CHECK_THROWS_AS(predict_svm(m, Eigen::MatrixXd::Zero(1, 2)), ContractViolation);
  const std::vector<int> short_labels{0, 1};
  CHECK_THROWS_AS(train_svm(k, short_labels), ContractViolation);
}

TEST_CASE("accuracy helper") {
  const std::vector<int> a{1, 0, 1, 1}, b{1, 1, 1, 0};
  CHECK(accuracy(a, b) == 0.5);
}
