#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkdist/error.hpp"
#include "qkdist/gram.hpp"

using namespace qkdist;

namespace {

Eigen::MatrixXd random_points(int m, int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = rng.uniform();
  return x;
}

FeatureMapSpec linear() { return FeatureMapSpec{}; }

GramOptions protocol_options(int shots, std::uint64_t seed = 1) {
  GramOptions o;
  o.source = GramSource::Protocol;
  o.session.shots = shots;
  o.master_seed = seed;
  return o;
}

double min_eigenvalue(const Eigen::MatrixXd &k) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("identical points give an all-ones normalized Gram") {
  Eigen::MatrixXd x(2, 2);
  x << 0.3, 0.4, 0.3, 0.4;
  for (auto src : {GramSource::ExactClassical, GramSource::ExactQuantum, GramSource::Protocol}) {
    GramOptions o = protocol_options(64);
    o.source = src;
    o.normalize = true;
    const GramEstimate g = assemble_gram(x, linear(), o);
    CHECK((g.values - Eigen::MatrixXd::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("orthogonal points give a zero off-diagonal") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 0, 1;
  GramOptions o;
  o.source = GramSource::ExactQuantum;
  const GramEstimate g = assemble_gram(x, linear(), o);
  CHECK(g.values(0, 1) == doctest::Approx(0.0));
  CHECK(g.values(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("exact quantum equals classical for linear kernel on nonnegative data") {
  const Eigen::MatrixXd x = random_points(12, 5, 1);
  GramOptions o;
  const GramEstimate c = assemble_gram(x, linear(), o);
  o.source = GramSource::ExactQuantum;
  const GramEstimate q = assemble_gram(x, linear(), o);
  CHECK((c.values - q.values).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((c.values - c.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fidelity convention is the squared normalized overlap") {
  const Eigen::MatrixXd x = random_points(5, 3, 2);
  GramOptions o;
  o.source = GramSource::ExactQuantum;
  o.convention = KernelConvention::Fidelity;
  const GramEstimate g = assemble_gram(x, linear(), o);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double cos = x.row(i).dot(x.row(j)) / (x.row(i).norm() * x.row(j).norm());
      CHECK(g.values(i, j) == doctest::Approx(cos * cos).epsilon(1e-12));
    }
}

TEST_CASE("protocol Gram approaches exact quantum at high shot counts") {
  const Eigen::MatrixXd x = random_points(10, 4, 3);
  GramOptions e;
  e.source = GramSource::ExactQuantum;
  const GramEstimate exact = assemble_gram(x, linear(), e);
  const GramEstimate p8192 = assemble_gram(x, linear(), protocol_options(8192, 5));
  const GramEstimate p128 = assemble_gram(x, linear(), protocol_options(128, 5));

  // Compare on the normalized scale, where entries are sqrt of fidelities.
  auto normalized_errors = [&](const GramEstimate &g) {
    std::vector<double> errs;
    for (int i = 0; i < 10; ++i)
      for (int j = i + 1; j < 10; ++j) {
        const double s = std::sqrt(exact.values(i, i) * exact.values(j, j));
        errs.push_back(std::abs(g.values(i, j) - exact.values(i, j)) / s);
      }
    return errs;
  };
  auto e8192 = normalized_errors(p8192), e128 = normalized_errors(p128);
  CHECK(*std::max_element(e8192.begin(), e8192.end()) <= 0.05);
  std::nth_element(e8192.begin(), e8192.begin() + e8192.size() / 2, e8192.end());
  std::nth_element(e128.begin(), e128.begin() + e128.size() / 2, e128.end());
  CHECK(e8192[e8192.size() / 2] < e128[e128.size() / 2]);
  CHECK(p8192.sessions == 45);
}

TEST_CASE("parallel assembly is identical to serial") {
  const Eigen::MatrixXd x = random_points(9, 3, 4);
  GramOptions o = protocol_options(256, 11);
  o.session.noise = NoiseModel::level1();
  const GramEstimate serial = assemble_gram(x, linear(), o);
  o.workers = 3;
  const GramEstimate parallel = assemble_gram(x, linear(), o);
  CHECK(serial.values == parallel.values);
}

TEST_CASE("skipped pairs are not run") {
  const Eigen::MatrixXd x = random_points(5, 2, 5);
  GramOptions o = protocol_options(16);
  const std::vector<bool> skip{false, false, false, true, true};
  o.skip_pairs_within = &skip;
  const GramEstimate g = assemble_gram(x, linear(), o);
  CHECK(g.sessions == 9);
  CHECK(g.values(3, 4) == 0.0);
}

TEST_CASE("decoy sessions are interleaved and honest decoys pass") {
  const Eigen::MatrixXd x = random_points(6, 2, 6);
  GramOptions o = protocol_options(16);
  o.decoy_interval = 3;
  const GramEstimate g = assemble_gram(x, linear(), o);
  CHECK(g.decoy_sessions == 5);
  CHECK(g.decoy_failures == 0);
}

TEST_CASE("transcripts are written per session") {
  const Eigen::MatrixXd x = random_points(4, 2, 7);
  std::ostringstream out;
  TranscriptSink sink(out);
  GramOptions o = protocol_options(8);
  o.sink = &sink;
  assemble_gram(x, linear(), o);
  CHECK(sink.records() == 6);
}

TEST_CASE("fidelity_to_kernel clips before the square root") {
  CHECK(fidelity_to_kernel(-0.2, 2.0, 3.0, KernelConvention::SqrtFidelity) == 0.0);
  CHECK(fidelity_to_kernel(1.3, 2.0, 3.0, KernelConvention::SqrtFidelity) == 6.0);
  CHECK(fidelity_to_kernel(0.25, 2.0, 3.0, KernelConvention::SqrtFidelity) == 3.0);
  CHECK(fidelity_to_kernel(0.25, 2.0, 3.0, KernelConvention::Fidelity) == 0.25);
}

TEST_CASE("psd_repair leaves PSD input unchanged") {
  const Eigen::MatrixXd x = random_points(6, 3, 8);
  GramEstimate g;
  g.values = x * x.transpose();
  const GramEstimate r = psd_repair(g);
  CHECK((r.values - g.values).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(r.repair == PsdRepair::None);
  CHECK(r.clipped_mass == 0.0);
}

TEST_CASE("psd_repair on a 2x2 indefinite matrix") {
  // [[1, b], [b, 1]] has eigenvalues 1 + b and 1 - b with eigenvectors
  // (1, 1)/sqrt2 and (1, -1)/sqrt2. Clipping 1 - b < 0 leaves
  // (1 + b)/2 * [[1, 1], [1, 1]]; restoring the unit diagonal gives all ones.
  GramEstimate g;
  g.values.resize(2, 2);
  g.values << 1.0, 1.2, 1.2, 1.0;
  const GramEstimate r = psd_repair(g);
  CHECK(r.repair == PsdRepair::Clipped);
  CHECK(r.clipped_mass == doctest::Approx(0.2));
  CHECK((r.values - Eigen::MatrixXd::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(min_eigenvalue(r.values) >= -1e-8);
}

TEST_CASE("psd_repair restores the diagonal and reports clipped mass") {
  Rng rng(9);
  Eigen::MatrixXd a(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = i == j ? 1.0 : rng.uniform() * 2 - 1;
  GramEstimate g;
  g.values = a;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
  double neg = 0.0;
  for (int i = 0; i < 8; ++i) neg += std::max(0.0, -ev(i));
  REQUIRE(neg > 0.0);
  const GramEstimate r = psd_repair(g);
  CHECK(r.clipped_mass == doctest::Approx(neg).epsilon(1e-10));
  CHECK(min_eigenvalue(r.values) >= -1e-8);
  for (int i = 0; i < 8; ++i) CHECK(r.values(i, i) == doctest::Approx(1.0));
  CHECK((r.values - r.values.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("psd_repair rejects asymmetric input") {
  GramEstimate g;
  g.values.resize(2, 2);
  g.values << 1, 0.5, 0.4, 1;
  CHECK_THROWS_AS(psd_repair(g), ContractViolation);
}

TEST_CASE("Gram CSV round trip is exact") {
  const Eigen::MatrixXd x = random_points(5, 3, 10);
  GramEstimate g = assemble_gram(x, linear(), protocol_options(100));
  g.clipped_mass = 0.125;
  std::stringstream ss;
  export_gram_csv(g, ss);
  const GramEstimate back = import_gram_csv(ss);
  CHECK(back.values == g.values);
  CHECK(back.source == GramSource::Protocol);
  CHECK(back.shots == 100);
  CHECK(back.clipped_mass == 0.125);
  CHECK(back.sessions == g.sessions);
  std::stringstream junk("hello\n");
  CHECK_THROWS_AS(import_gram_csv(junk), DataError);
}

TEST_CASE("zero-norm points cannot be encoded") {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 1, 1;
  GramOptions o;
  o.source = GramSource::ExactQuantum;
  CHECK_THROWS_AS(assemble_gram(x, linear(), o), EncodingError);
}
