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


// Config-driven experiment runs and the named suites built from them.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qkdist/cv.hpp"

namespace qkdist {

struct ExperimentConfig {
  /// Known dataset name (wine, parkinsons, heart, digits) or a CSV path.
  std::string dataset = "wine";
  std::string label_column;
  std::string data_dir = "data";
  /// Free-form label for the "method" column; derived from the model if empty.
  std::string method;
  FeatureMapSpec kernel;
  GramSource mode = GramSource::ExactClassical;
  KernelConvention convention = KernelConvention::SqrtFidelity;
  int shots = 1024;
  NoiseLevel noise = NoiseLevel::None;
  int folds = 5;
  ModelKind model = ModelKind::Svm;
  int kpca_components = 5;
  double C = 1.0;
  double tolerance = 1e-3;
  int max_passes = 200;
  std::uint64_t seed = 0;
  /// Stratified subsample size; unset means 600 for protocol runs on larger
  /// datasets and no cap otherwise, 0 disables capping.
  std::optional<std::size_t> sample_cap;
  int qubits = 0;
  ExecutionMode execution = ExecutionMode::Streaming;
  int decoy_interval = 0;
  bool adversary = false;
  bool obfuscate = true;
  bool per_shot = false;
  bool normalize = false;
  int workers = 1;
  /// Line-delimited transcript output; empty disables.
  std::string transcripts;

  /// Sample cap actually applied to a dataset of `size` samples (0 = none).
  std::size_t effective_cap(std::size_t size) const;
};

inline constexpr std::size_t kDefaultProtocolCap = 600;

/// Parses the JSON config format; unknown keys are rejected.
ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config(const std::filesystem::path &path);
/// Canonical JSON; parse_config(to_json(c)) round-trips.
std::string to_json(const ExperimentConfig &config);
/// Digest over every field that affects results (not workers, paths or
/// transcript settings).
std::string config_digest(const ExperimentConfig &config);

PipelineConfig pipeline_config(const ExperimentConfig &config);

struct ResultRow {
  std::string cell;
  std::string dataset;
  std::string method;
  std::string mode;
  std::string kernel;
  std::string convention;
  int shots = 0;
  std::string noise;
  int folds = 0;
  std::size_t samples = 0;
  std::size_t sample_cap = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> fold_accuracies;
  std::uint64_t seed = 0;
  std::string digest;
  std::size_t sessions = 0;
  std::string status = "ok";
  std::string error;
  /// Not part of the CSV row; reported separately.
  double wall_seconds = 0.0;
};

std::string result_csv_header();
std::string to_csv(const ResultRow &row);
/// Parses a line written by to_csv.
ResultRow parse_result_row(const std::string &line);

/// Loads, caps, and cross-validates. Errors propagate as exceptions.
ResultRow run_experiment(const ExperimentConfig &config, const std::string &cell = "", TranscriptSink *sink = nullptr);

struct SuiteCell {
  std::string name;
  /// Plot series and x coordinate for the plot-data file.
  std::string series;
  std::string x;
  ExperimentConfig config;
};

/// Cells of table1, figure3 or figure4. `smoke` shrinks sample caps so the
/// whole grid finishes quickly.
std::vector<SuiteCell> suite_cells(const std::string &suite, bool smoke = false);

struct SuiteOptions {
  std::string suite;
  std::filesystem::path out_dir = "results";
  std::filesystem::path data_dir = "data";
  int workers = 1;
  std::optional<std::uint64_t> seed;
  bool smoke = false;
  int verbosity = 1;
  /// Called after every cell (completed, skipped or failed).
  std::function<void(const ResultRow &, bool skipped)> progress;
};

struct SuiteSummary {
  std::size_t cells = 0;
  std::size_t completed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::filesystem::path results;
  std::filesystem::path plot_data;
};

/// Writes <out>/<suite>.csv (one row per cell, resumable by digest),
/// <out>/<suite>_timings.csv and <out>/<suite>_plot.csv (series,x,y,err).
/// A failing cell is recorded with status "error" and the suite continues.
SuiteSummary run_suite(const SuiteOptions &options);

struct ValidationReport {
  bool ok = true;
  int qubits = 0;
  int streaming_qubits = 0;
  int full_circuit_qubits = 0;
  int capacity = 0;
  std::size_t samples = 0;
  std::size_t pairs = 0;
  std::size_t sessions = 0;
  std::uint64_t total_shots = 0;
  std::vector<std::string> messages;

  std::string to_json() const;
};

/// Capacity and workload estimate. Reads the dataset when it is available;
/// otherwise uses the schema's documented shape.
ValidationReport validate_config(const ExperimentConfig &config, int capacity = kDefaultMaxQubits);

}  // namespace qkdist
