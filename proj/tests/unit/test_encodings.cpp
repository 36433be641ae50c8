#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "qkdist/encodings.hpp"
#include "qkdist/error.hpp"

using namespace qkdist;

namespace {

std::vector<double> random_vec(int n, Rng &rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto &x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

double rescaled_overlap(const EncodedPoint &a, const EncodedPoint &b) { return a.norm_factor * b.norm_factor * inner(a, b); }

// Explicit d-fold tensor power of z = (s * x_1, ..., s * x_N, t): every
// ordered index tuple is one feature. Its self inner product is
// (s^2 x.y + t^2)^d.
std::vector<double> tensor_power_features(const std::vector<double> &x, double s, double t, int d) {
  std::vector<double> z;
  for (double v : x) z.push_back(s * v);
  z.push_back(t);
  std::vector<double> feat{1.0};
  for (int k = 0; k < d; ++k) {
    std::vector<double> next;
    for (double f : feat)
      for (double v : z) next.push_back(f * v);
    feat = next;
  }
  return feat;
}

}  // namespace

TEST_CASE("linear encoding normalizes and pads") {
  const std::vector<double> x{3.0, 4.0, 0.0};
  const EncodedPoint e = encode_linear(x);
  CHECK(e.amplitudes.size() == 4);
  CHECK(e.norm_factor == doctest::Approx(5.0));
  CHECK(e.amplitudes[0] == doctest::Approx(0.6));
  CHECK(e.amplitudes[3] == 0.0);
  CHECK(e.num_qubits() == 2);
}

TEST_CASE("single feature still occupies one qubit") {
  const std::vector<double> x{2.0};
  const EncodedPoint e = encode_linear(x);
  CHECK(e.amplitudes.size() == 2);
  CHECK(e.amplitudes[0] == doctest::Approx(1.0));
}

TEST_CASE("zero and non-finite inputs are rejected") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(encode_linear(zero), EncodingError);
  const std::vector<double> bad{1.0, std::nan("")};
  CHECK_THROWS(encode_linear(bad));
}

TEST_CASE("linear and copies maps reproduce their kernels") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(6));
    const auto x = random_vec(n, rng), y = random_vec(n, rng);
    const double xy = dot(x, y);
    CHECK(rescaled_overlap(encode_linear(x), encode_linear(y)) == doctest::Approx(xy).epsilon(1e-12));
    for (int d = 1; d <= 3; ++d) {
      const double k = rescaled_overlap(encode_copies(x, d), encode_copies(y, d));
      CHECK(std::abs(k - std::pow(xy, d)) <= 1e-12 * std::max(1.0, std::abs(std::pow(xy, d))));
    }
  }
}

TEST_CASE("copies: first copy sits on the low qubits") {
  const std::vector<double> x{1.0, 0.0};
  const std::vector<double> y{0.0, 1.0};
  const EncodedPoint e = encode_copies(x, 2);
  CHECK(e.amplitudes.size() == 4);
  CHECK(e.amplitudes[0] == doctest::Approx(1.0));
  const EncodedPoint f = encode_copies(y, 2);
  CHECK(f.amplitudes[3] == doctest::Approx(1.0));
}

TEST_CASE("polynomial map matches the tensor-power oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(4));
    const int d = 1 + static_cast<int>(rng.uniform_index(3));
    const double a = 0.2 + 2.0 * rng.uniform();
    const double c = 0.1 + 2.0 * rng.uniform();
    const auto x = random_vec(n, rng), y = random_vec(n, rng);
    const auto fx = tensor_power_features(x, std::sqrt(a), std::sqrt(c), d);
    const auto fy = tensor_power_features(y, std::sqrt(a), std::sqrt(c), d);
    const double oracle = dot(fx, fy);
    const double k = rescaled_overlap(encode_poly(x, a, c, d), encode_poly(y, a, c, d));
    CHECK(std::abs(k - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
    CHECK(std::abs(oracle - std::pow(a * dot(x, y) + c, d)) <= 1e-10 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("sqrt(a) on every component would scale the whole kernel by a") {
  // The alternative placement multiplies the entire a = 1 feature vector by
  // sqrt(a), giving a * (x.y + c)^d instead of (a x.y + c)^d.
  const std::vector<double> x{0.3, 0.5}, y{0.7, 0.2};
  const double a = 2.0, c = 1.0;
  const int d = 2;
  const auto fx = tensor_power_features(x, 1.0, std::sqrt(c), d);
  const auto fy = tensor_power_features(y, 1.0, std::sqrt(c), d);
  const double all_scaled = a * dot(fx, fy);
  CHECK(all_scaled == doctest::Approx(a * std::pow(dot(x, y) + c, d)));
  const double ours = rescaled_overlap(encode_poly(x, a, c, d), encode_poly(y, a, c, d));
  CHECK(ours == doctest::Approx(std::pow(a * dot(x, y) + c, d)));
  CHECK(std::abs(ours - all_scaled) > 0.1);
}

TEST_CASE("polynomial multi-indices") {
  const auto idx = poly_multi_indices(2, 2);
  // Compositions of 2 into 3 parts: C(4, 2) = 6, lexicographically decreasing.
  REQUIRE(idx.size() == 6);
  CHECK(idx.front() == std::vector<int>{2, 0, 0});
  CHECK(idx.back() == std::vector<int>{0, 0, 2});
  for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i - 1] > idx[i]);
  for (const auto &k : idx) CHECK(std::accumulate(k.begin(), k.end(), 0) == 2);
}

TEST_CASE("RFF maps concentrate around the target kernels") {
  Rng rng(3);
  for (auto kind : {FeatureMapKind::Rbf, FeatureMapKind::Laplacian}) {
    FeatureMapSpec spec;
    spec.kind = kind;
    spec.input_dim = 3;
    spec.rff_samples = 2048;
    const RffDraw draw = sample_rff(spec, 99);
    double worst = 0.0;
    for (int t = 0; t < 30; ++t) {
      const auto x = random_vec(3, rng, 0.0, 1.0), y = random_vec(3, rng, 0.0, 1.0);
      const double k = inner(encode_rff(x, draw, spec), encode_rff(y, draw, spec));
      worst = std::max(worst, std::abs(k - classical_kernel(x, y, spec)));
    }
    CHECK(worst < 0.1);
  }
}

TEST_CASE("RFF self-overlap is one and draws are seed-determined") {
  FeatureMapSpec spec;
  spec.kind = FeatureMapKind::Rbf;
  spec.input_dim = 2;
  spec.rff_samples = 8;
  const std::vector<double> x{0.1, 0.9};
  const RffDraw d1 = sample_rff(spec, 5), d2 = sample_rff(spec, 5), d3 = sample_rff(spec, 6);
  CHECK(d1.weights == d2.weights);
  CHECK(d1.weights != d3.weights);
  const EncodedPoint e = encode_rff(x, d1, spec);
  CHECK(inner(e, e) == doctest::Approx(1.0));
  CHECK(e.amplitudes.size() == 16);
}

TEST_CASE("feature map spec validation") {
  FeatureMapSpec spec;
  spec.kind = FeatureMapKind::Poly;
  spec.input_dim = 4;
  spec.degree = 0;
  CHECK_THROWS(spec.validate());
  spec.degree = 2;
  spec.c = -1.0;
  CHECK_THROWS(spec.validate());
  FeatureMapSpec big;
  big.kind = FeatureMapKind::Copies;
  big.input_dim = 1 << 10;
  big.degree = 3;
  CHECK_THROWS_AS(big.validate(), CapacityError);
  CHECK(feature_map_kind_from_string("laplacian") == FeatureMapKind::Laplacian);
  CHECK_THROWS_AS(feature_map_kind_from_string("sigmoid"), ConfigError);
}

TEST_CASE("obfuscation is a shared signed permutation preserving inner products") {
  Rng rng(4);
  const Obfuscation m1 = obfuscation_unitary(16, 77, 3);
  const Obfuscation m2 = obfuscation_unitary(16, 77, 3);
  const Obfuscation m3 = obfuscation_unitary(16, 77, 4);
  CHECK(m1.permutation == m2.permutation);
  CHECK(m1.signs == m2.signs);
  CHECK((m1.permutation != m3.permutation || m1.signs != m3.signs));
  const std::set<std::uint32_t> perm(m1.permutation.begin(), m1.permutation.end());
  CHECK(perm.size() == 16);
  const auto x = random_vec(16, rng), y = random_vec(16, rng);
  CHECK(dot(apply_obfuscation(x, m1), apply_obfuscation(y, m1)) == doctest::Approx(dot(x, y)).epsilon(1e-14));
}
