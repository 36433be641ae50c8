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


#include "qkdist/cv.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "qkdist/error.hpp"
#include "qkdist/kpca.hpp"
#include "qkdist/rng.hpp"

namespace qkdist {

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ContractViolation("cross-validation needs at least 2 folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto &[label, members] : by_class) {
    if (members.size() < static_cast<std::size_t>(folds))
      throw DataError("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                      " samples, fewer than the " + std::to_string(folds) + " folds");
  }

  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  std::size_t deal = 0;
  for (auto &[label, members] : by_class) {
    Rng rng(derive_seed(seed, "folds", {static_cast<std::uint64_t>(label)}));
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.uniform_index(i)]);
    // Continue the round-robin where the previous class stopped so fold sizes
    // stay balanced overall.
    for (std::size_t idx : members) out[deal++ % out.size()].push_back(idx);
  }
  for (auto &f : out) std::sort(f.begin(), f.end());
  return out;
}

CvReport cross_validate(std::span<const int> labels, int folds, std::uint64_t seed, const FoldEvaluator &evaluate) {
  const auto split = stratified_folds(labels, folds, seed);
  CvReport report;
  report.samples = labels.size();
  std::vector<char> is_test(labels.size());
  for (int f = 0; f < folds; ++f) {
    const auto &test = split[static_cast<std::size_t>(f)];
    std::fill(is_test.begin(), is_test.end(), 0);
    for (std::size_t i : test) is_test[i] = 1;
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (!is_test[i]) train.push_back(i);
    report.fold_accuracies.push_back(evaluate(train, test, f));
  }
  double sum = 0.0;
  for (double a : report.fold_accuracies) sum += a;
  report.mean = sum / folds;
  double sq = 0.0;
  for (double a : report.fold_accuracies) sq += (a - report.mean) * (a - report.mean);
  report.stddev = std::sqrt(sq / folds);
  return report;
}

std::string to_string(ModelKind model) { return model == ModelKind::KpcaSvm ? "kpca_svm" : "svm"; }

ModelKind model_kind_from_string(const std::string &text) {
  if (text == "svm") return ModelKind::Svm;
  if (text == "kpca_svm") return ModelKind::KpcaSvm;
  throw ConfigError("unknown model '" + text + "' (expected svm or kpca_svm)");
}

std::string describe(const PipelineConfig &config) {
  nlohmann::ordered_json j;
  const FeatureMapSpec &k = config.kernel;
  j["kernel"] = {{"kind", to_string(k.kind)}, {"degree", k.degree}, {"a", k.a},          {"c", k.c},
                 {"sigma", k.sigma},         {"alpha", k.alpha},   {"rff_samples", k.rff_samples}};
  j["mode"] = to_string(config.mode);
  j["convention"] = to_string(config.convention);
  if (config.mode == GramSource::Protocol) j["session"] = digest(config.session);
  j["model"] = to_string(config.model);
  if (config.model == ModelKind::KpcaSvm) j["kpca_components"] = config.kpca_components;
  j["C"] = config.svm.C;
  j["tolerance"] = config.svm.tolerance;
  j["max_passes"] = config.svm.max_passes;
  j["decoy_interval"] = config.decoy_interval;
  j["normalize"] = config.normalize;
  j["repair"] = config.repair;
  return j.dump();
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd &m, std::span<const std::size_t> idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(idx[r]));
  return out;
}

}  // namespace

CvReport stratified_cv(const Dataset &dataset, const PipelineConfig &config, int folds, std::uint64_t seed) {
  if (dataset.size() == 0) throw DataError("dataset '" + dataset.name + "' is empty");
  const std::uint64_t fold_seed = derive_seed(seed, "folds");
  const std::uint64_t gram_seed = derive_seed(seed, "gram");
  std::size_t sessions = 0;
  double clipped = 0.0;

  const auto evaluate = [&](std::span<const std::size_t> train, std::span<const std::size_t> test, int fold) {
    const std::size_t mt = train.size();
    const std::size_t ms = test.size();
    MinMaxScaler scaler;
    const Eigen::MatrixXd x_train = scaler.fit_transform(take_rows(dataset.features, train));
    const Eigen::MatrixXd x_test = scaler.transform(take_rows(dataset.features, test));
    Eigen::MatrixXd all(static_cast<Eigen::Index>(mt + ms), dataset.features.cols());
    all << x_train, x_test;

    GramOptions opt;
    opt.source = config.mode;
    opt.convention = config.convention;
    opt.session = config.session;
    opt.master_seed = gram_seed;
    opt.stream = static_cast<std::uint64_t>(fold) + 1;
    opt.workers = config.workers;
    opt.decoy_interval = config.decoy_interval;
    opt.normalize = config.normalize;
    opt.sink = config.sink;
    std::vector<bool> skip(mt + ms, false);
    std::fill(skip.begin() + static_cast<std::ptrdiff_t>(mt), skip.end(), true);
    opt.skip_pairs_within = &skip;
    const GramEstimate full = assemble_gram(all, config.kernel, opt);
    sessions += full.sessions;

    const auto nt = static_cast<Eigen::Index>(mt);
    const auto ns = static_cast<Eigen::Index>(ms);
    GramEstimate train_gram = full;
    train_gram.values = full.values.topLeftCorner(nt, nt);
    if (config.repair) {
      train_gram = psd_repair(train_gram);
      clipped += train_gram.clipped_mass;
    }
    const Eigen::MatrixXd cross = full.values.bottomLeftCorner(ns, nt);

    std::vector<int> y_train(mt), y_test(ms);
    for (std::size_t i = 0; i < mt; ++i) y_train[i] = dataset.labels[train[i]];
    for (std::size_t i = 0; i < ms; ++i) y_test[i] = dataset.labels[test[i]];

    std::vector<int> predicted;
    if (config.model == ModelKind::Svm) {
      const SvmModel model = train_svm(train_gram.values, y_train, config.svm);
      predicted = predict_svm(model, cross);
    } else {
      const KpcaProjection proj = fit_kpca(train_gram.values, config.kpca_components);
      const Eigen::MatrixXd z_train = proj.transform(train_gram.values);
      const Eigen::MatrixXd z_test = proj.transform(cross);
      const SvmModel model = train_svm(z_train * z_train.transpose(), y_train, config.svm);
      predicted = predict_svm(model, z_test * z_train.transpose());
    }
    return accuracy(predicted, y_test);
  };

  CvReport report = cross_validate(dataset.labels, folds, fold_seed, evaluate);
  report.config_digest = hex_digest(describe(config) + "|folds=" + std::to_string(folds) + "|seed=" + std::to_string(seed));
  report.sessions = sessions;
  report.clipped_mass = clipped;
  return report;
}

}  // namespace qkdist
