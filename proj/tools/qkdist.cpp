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


// qkdist command-line runner.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qkdist/data.hpp"
#include "qkdist/error.hpp"
#include "qkdist/experiment.hpp"
#include "qkdist/gram.hpp"
#include "qkdist/rng.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string data_dir;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  int verbosity = 1;
};

qkdist::ExperimentConfig load(const Common &c) {
  if (c.config.empty()) throw qkdist::ConfigError("--config is required");
  qkdist::ExperimentConfig cfg = qkdist::load_config(c.config);
  if (!c.data_dir.empty()) cfg.data_dir = c.data_dir;
  if (c.workers > 0) cfg.workers = c.workers;
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

int cmd_run(const Common &c) {
  const qkdist::ExperimentConfig cfg = load(c);
  const qkdist::ResultRow row = qkdist::run_experiment(cfg, c.config);
  const std::string line = qkdist::to_csv(row);
  if (!c.out.empty()) {
    const bool fresh = !std::filesystem::exists(c.out);
    std::ofstream out(c.out, std::ios::app);
    if (!out) throw qkdist::ConfigError("cannot write " + c.out);
    if (fresh) out << qkdist::result_csv_header() << '\n';
    out << line << '\n';
  }
  std::cout << qkdist::result_csv_header() << '\n' << line << '\n';
  if (c.verbosity > 0) std::fprintf(stderr, "wall time %.2f s\n", row.wall_seconds);
  return 0;
}

int cmd_suite(const Common &c, const std::string &suite, bool smoke) {
  qkdist::SuiteOptions opt;
  opt.suite = suite;
  opt.out_dir = c.out.empty() ? "results" : c.out;
  opt.data_dir = c.data_dir.empty() ? "data" : c.data_dir;
  opt.workers = c.workers > 0 ? c.workers : 1;
  opt.seed = c.seed;
  opt.smoke = smoke;
  opt.verbosity = c.verbosity;
  opt.progress = [&](const qkdist::ResultRow &row, bool skipped) {
    if (c.verbosity <= 0) return;
    if (skipped)
      std::fprintf(stderr, "[skip] %s (digest %s)\n", row.cell.c_str(), row.digest.c_str());
    else if (row.status == "ok")
      std::fprintf(stderr, "[done] %s mean %.4f std %.4f (%.1f s)\n", row.cell.c_str(), row.mean, row.stddev,
                   row.wall_seconds);
    else
      std::fprintf(stderr, "[fail] %s %s\n", row.cell.c_str(), row.error.c_str());
  };
  const qkdist::SuiteSummary s = qkdist::run_suite(opt);
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["cells"] = s.cells;
  j["completed"] = s.completed;
  j["skipped"] = s.skipped;
  j["failed"] = s.failed;
  j["results"] = s.results.string();
  j["plot_data"] = s.plot_data.string();
  std::cout << j.dump(2) << '\n';
  return s.failed == 0 ? 0 : 3;
}

int cmd_validate(const Common &c, int capacity) {
  const qkdist::ValidationReport r = qkdist::validate_config(load(c), capacity);
  std::cout << r.to_json() << '\n';
  return r.ok ? 0 : 2;
}

int cmd_gram_export(const Common &c) {
  const qkdist::ExperimentConfig cfg = load(c);
  qkdist::Dataset ds = qkdist::load_dataset(cfg.dataset, cfg.data_dir, cfg.label_column);
  const std::size_t cap = cfg.effective_cap(ds.size());
  if (cap > 0) ds = qkdist::subsample_stratified(ds, cap, qkdist::derive_seed(cfg.seed, "subsample"));
  qkdist::MinMaxScaler scaler;
  const Eigen::MatrixXd x = scaler.fit_transform(ds.features);
  const qkdist::PipelineConfig p = qkdist::pipeline_config(cfg);
  qkdist::GramOptions opt;
  opt.source = p.mode;
  opt.convention = p.convention;
  opt.session = p.session;
  opt.master_seed = qkdist::derive_seed(cfg.seed, "gram");
  opt.workers = p.workers;
  opt.decoy_interval = p.decoy_interval;
  opt.normalize = p.normalize;
  const qkdist::GramEstimate g = qkdist::assemble_gram(x, p.kernel, opt);
  if (c.out.empty()) {
    qkdist::export_gram_csv(g, std::cout);
  } else {
    std::ofstream out(c.out);
    if (!out) throw qkdist::ConfigError("cannot write " + c.out);
    qkdist::export_gram_csv(g, out);
  }
  return 0;
}

void add_common(CLI::App *app, Common &c, bool needs_config) {
  auto *opt = app->add_option("-c,--config", c.config, "experiment config (JSON)");
  if (needs_config) opt->required();
  app->add_option("-o,--out", c.out, "output file or directory");
  app->add_option("--data-dir", c.data_dir, "directory holding the dataset CSV files");
  app->add_option("-w,--workers", c.workers, "worker threads")->check(CLI::NonNegativeNumber);
  app->add_option("--seed", c.seed, "master seed override");
  app->add_option("-v,--verbosity", c.verbosity, "0 = quiet, 1 = progress, 2 = debug");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Distributed quantum-kernel experiment runner"};
  app.require_subcommand(1);
  Common common;

  auto *run = app.add_subcommand("run", "run one experiment config, print its result row");
  add_common(run, common, true);

  auto *suite = app.add_subcommand("suite", "run a named experiment grid");
  std::string suite_name;
  bool smoke = false;
  suite->add_option("-s,--suite", suite_name, "table1, figure3 or figure4")
      ->required()
      ->check(CLI::IsMember({"table1", "figure3", "figure4"}));
  suite->add_flag("--smoke", smoke, "reduced sample caps for a quick pass");
  add_common(suite, common, false);

  auto *validate = app.add_subcommand("validate", "report qubit budgets and workload for a config");
  int capacity = qkdist::kDefaultMaxQubits;
  validate->add_option("--capacity", capacity, "simulator qubit capacity");
  add_common(validate, common, true);

  auto *gram = app.add_subcommand("gram", "Gram matrix utilities");
  gram->require_subcommand(1);
  auto *gram_export = gram->add_subcommand("export", "assemble the Gram matrix of a whole dataset as CSV");
  add_common(gram_export, common, true);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(common);
    if (*suite) return cmd_suite(common, suite_name, smoke);
    if (*validate) return cmd_validate(common, capacity);
    if (*gram_export) return cmd_gram_export(common);
  } catch (const qkdist::Error &e) {
    nlohmann::ordered_json err{{"error", e.kind()}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const std::exception &e) {
    nlohmann::ordered_json err{{"error", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}
