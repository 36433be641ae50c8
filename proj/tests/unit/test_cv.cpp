#include <doctest.h>

#include <map>
#include <set>

#include "qkdist/cv.hpp"
#include "qkdist/error.hpp"

using namespace qkdist;

namespace {

Dataset blobs(int per_class, int classes, double spread, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.name = "blobs";
  ds.features.resize(per_class * classes, 3);
  for (int c = 0; c < classes; ++c) {
    ds.class_names.push_back(std::to_string(c));
    for (int i = 0; i < per_class; ++i) {
      const int r = c * per_class + i;
      for (int j = 0; j < 3; ++j) ds.features(r, j) = (j == c % 3 ? 5.0 : 1.0) + spread * rng.normal();
      ds.labels.push_back(c);
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("stratified folds partition the data with balanced classes") {
  std::vector<int> labels;
  for (int i = 0; i < 37; ++i) labels.push_back(0);
  for (int i = 0; i < 23; ++i) labels.push_back(1);
  for (int i = 0; i < 11; ++i) labels.push_back(2);
  const auto folds = stratified_folds(labels, 5, 1);
  std::set<std::size_t> seen;
  for (const auto &f : folds) {
    std::map<int, int> counts;
    for (auto i : f) {
      CHECK(seen.insert(i).second);
      counts[labels[i]]++;
    }
    CHECK(std::abs(counts[0] - 37.0 / 5) <= 1.0);
    CHECK(std::abs(counts[1] - 23.0 / 5) <= 1.0);
    CHECK(std::abs(counts[2] - 11.0 / 5) <= 1.0);
  }
  CHECK(seen.size() == labels.size());
  CHECK(stratified_folds(labels, 5, 1) == folds);
  CHECK(stratified_folds(labels, 5, 2) != folds);
}

TEST_CASE("classes smaller than the fold count are rejected") {
  const std::vector<int> labels{0, 0, 0, 0, 0, 1, 1, 1};
  CHECK_THROWS_AS(stratified_folds(labels, 5, 0), DataError);
}

TEST_CASE("perfectly learnable data scores 1.0 with zero spread") {
  const Dataset ds = blobs(20, 3, 0.05, 1);
  PipelineConfig cfg;
  const CvReport r = stratified_cv(ds, cfg, 5, 0);
  CHECK(r.fold_accuracies.size() == 5);
  CHECK(r.mean == 1.0);
  CHECK(r.stddev == 0.0);
  CHECK(r.config_digest.size() == 16);
}

TEST_CASE("cross-validation is deterministic per seed") {
  const Dataset ds = blobs(15, 2, 1.5, 2);
  PipelineConfig cfg;
  cfg.mode = GramSource::Protocol;
  cfg.session.shots = 64;
  const CvReport a = stratified_cv(ds, cfg, 5, 7);
  const CvReport b = stratified_cv(ds, cfg, 5, 7);
  CHECK(a.fold_accuracies == b.fold_accuracies);
  CHECK(a.config_digest == b.config_digest);
  CHECK(a.sessions > 0);
  const CvReport c = stratified_cv(ds, cfg, 5, 8);
  CHECK(c.config_digest != a.config_digest);
}

TEST_CASE("kPCA pipeline runs and separates easy data") {
  const Dataset ds = blobs(20, 2, 0.1, 3);
  PipelineConfig cfg;
  cfg.model = ModelKind::KpcaSvm;
  cfg.kpca_components = 2;
  const CvReport r = stratified_cv(ds, cfg, 5, 0);
  CHECK(r.mean == 1.0);
}

TEST_CASE("population standard deviation over folds") {
  const std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1};
  int calls = 0;
  const CvReport r = cross_validate(labels, 2, 0, [&](auto, auto, int) { return calls++ == 0 ? 0.5 : 1.0; });
  CHECK(r.mean == 0.75);
  CHECK(r.stddev == 0.25);
}

TEST_CASE("model names") {
  CHECK(model_kind_from_string("kpca_svm") == ModelKind::KpcaSvm);
  CHECK_THROWS_AS(model_kind_from_string("tree"), ConfigError);
}
