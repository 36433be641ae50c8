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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qkdist {

struct Dataset {
  std::string name;
  /// m samples x N features.
  Eigen::MatrixXd features;
  /// Contiguous class ids starting at 0.
  std::vector<int> labels;
  /// Original label text for each class id.
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;
  std::string provenance;
  std::size_t dropped_rows = 0;
  std::vector<std::string> warnings;

  std::size_t size() const { return labels.size(); }
  int num_features() const { return static_cast<int>(features.cols()); }
  int num_classes() const { return static_cast<int>(class_names.size()); }
  std::vector<double> row(std::size_t i) const;
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Order-sensitive checksum over features and labels.
  std::uint64_t checksum() const;
};

/// Column layout of one of the bundled experiment datasets.
struct DatasetSchema {
  std::string name;
  std::string file;
  std::string label_column;
  std::vector<std::string> drop_columns;
  std::size_t expected_samples = 0;
  int expected_features = 0;
  int expected_classes = 0;
};

const std::vector<DatasetSchema> &known_schemas();
std::optional<DatasetSchema> find_schema(const std::string &name);

/// Reads a headered CSV. Rows with missing values ("", "NA", "nan", "?") or
/// unparsable fields are dropped and counted. Columns in `drop_columns` are
/// ignored. Labels are mapped to 0..k-1 in sorted order of their text (numeric
/// labels sort numerically).
Dataset load_csv(const std::filesystem::path &path, const std::string &label_column,
                 const std::vector<std::string> &drop_columns = {});

/// Loads a known dataset from `data_dir`, or any CSV path with its schema
/// taken from the file stem. Shape mismatches are recorded as warnings.
Dataset load_dataset(const std::string &name_or_path, const std::filesystem::path &data_dir,
                     const std::string &label_column = "");

/// Per-feature min-max scaling into [0, 1]; statistics come from training data.
class MinMaxScaler {
 public:
  void fit(const Eigen::MatrixXd &train);
  /// Constant training columns map to 0.5; values outside the training range
  /// are clipped to [0, 1].
  Eigen::MatrixXd transform(const Eigen::MatrixXd &features) const;
  Eigen::MatrixXd fit_transform(const Eigen::MatrixXd &train);

  const Eigen::VectorXd &min() const { return min_; }
  const Eigen::VectorXd &max() const { return max_; }

 private:
  Eigen::VectorXd min_;
  Eigen::VectorXd max_;
};

/// Zero-pads x to 2^n entries.
std::vector<double> pad_features(std::span<const double> x, int n);

/// Stratified subset of `count` samples, deterministic per seed. Classes get
/// proportional quotas (largest remainder, ties to the lower class id).
std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t count, std::uint64_t seed);
Dataset subsample_stratified(const Dataset &dataset, std::size_t count, std::uint64_t seed);
Dataset subsample_digits(const Dataset &digits, std::size_t count = 100, std::uint64_t seed = 0);

}  // namespace qkdist
