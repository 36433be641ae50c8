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

#include "qkdist/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "qkdist/error.hpp"
#include "qkdist/rng.hpp"

namespace qkdist {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      current.push_back(ch);
    } else if (ch == ',' && !quoted) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

bool is_missing(const std::string &field) {
  if (field.empty() || field == "?") return true;
  std::string lower = field;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower == "na" || lower == "nan" || lower == "null";
}

std::optional<double> parse_number(const std::string &field) {
  if (is_missing(field)) return std::nullopt;
  char *end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::vector<double> Dataset::row(std::size_t i) const {
  std::vector<double> out(static_cast<std::size_t>(features.cols()));
  for (Eigen::Index j = 0; j < features.cols(); ++j) out[static_cast<std::size_t>(j)] = features(static_cast<Eigen::Index>(i), j);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.name = name;
  out.class_names = class_names;
  out.feature_names = feature_names;
  out.provenance = provenance;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= size()) throw ContractViolation("subset index out of range");
    out.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(indices[r]));
    out.labels.push_back(labels[indices[r]]);
  }
  return out;
}

std::uint64_t Dataset::checksum() const {
  std::uint64_t h = fnv1a64(name);
  for (Eigen::Index i = 0; i < features.rows(); ++i)
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      std::uint64_t bits;
      const double v = features(i, j);
      std::memcpy(&bits, &v, sizeof bits);
      h = splitmix64(h ^ bits);
    }
  for (int l : labels) h = splitmix64(h ^ static_cast<std::uint64_t>(l));
  return h;
}

const std::vector<DatasetSchema> &known_schemas() {
  static const std::vector<DatasetSchema> schemas = {
      {"wine", "wine.csv", "class", {}, 178, 13, 3},
      {"parkinsons", "parkinsons.csv", "status", {"name"}, 197, 23, 2},
      {"framingham", "framingham.csv", "TenYearCHD", {}, 4238, 15, 2},
      {"digits", "digits.csv", "target", {}, 1797, 64, 10},
  };
  return schemas;
}

std::optional<DatasetSchema> find_schema(const std::string &name) {
  for (const auto &s : known_schemas())
    if (s.name == name) return s;
  if (name == "heart") return find_schema("framingham");
  return std::nullopt;
}

Dataset load_csv(const std::filesystem::path &path, const std::string &label_column,
                 const std::vector<std::string> &drop_columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset file " + path.string() + " is empty");
  const std::vector<std::string> header = split_csv_line(line);

  int label_index = -1;
  std::vector<int> feature_indices;
  Dataset ds;
  ds.name = path.stem().string();
  ds.provenance = path.string();
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == label_column) {
      label_index = i;
    } else if (std::find(drop_columns.begin(), drop_columns.end(), header[i]) == drop_columns.end()) {
      feature_indices.push_back(i);
      ds.feature_names.push_back(header[i]);
    }
  }
  if (label_index < 0) throw DataError("label column '" + label_column + "' not found in " + path.string());
  if (feature_indices.empty()) throw DataError("no feature columns in " + path.string());

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    bool ok = fields.size() == header.size() && !is_missing(fields[label_index]);
    std::vector<double> values;
    values.reserve(feature_indices.size());
    for (std::size_t k = 0; ok && k < feature_indices.size(); ++k) {
      const auto v = parse_number(fields[feature_indices[k]]);
      if (!v) ok = false;
      else values.push_back(*v);
    }
    if (!ok) {
      ++ds.dropped_rows;
      continue;
    }
    rows.push_back(std::move(values));
    raw_labels.push_back(fields[label_index]);
  }
  if (rows.empty()) throw DataError("no usable rows in " + path.string());
  if (ds.dropped_rows > 0)
    ds.warnings.push_back("dropped " + std::to_string(ds.dropped_rows) + " rows with missing or malformed values");

  std::vector<std::string> classes = raw_labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  const bool numeric = std::all_of(classes.begin(), classes.end(), [](const std::string &s) { return parse_number(s).has_value(); });
  if (numeric)
    std::sort(classes.begin(), classes.end(),
              [](const std::string &a, const std::string &b) { return *parse_number(a) < *parse_number(b); });
  std::map<std::string, int> class_id;
  for (std::size_t i = 0; i < classes.size(); ++i) class_id[classes[i]] = static_cast<int>(i);

  ds.class_names = classes;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feature_indices.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    ds.labels.push_back(class_id.at(raw_labels[r]));
  }
  return ds;
}

Dataset load_dataset(const std::string &name_or_path, const std::filesystem::path &data_dir,
                     const std::string &label_column) {
  const auto schema = find_schema(name_or_path);
  if (!schema) {
    std::filesystem::path path(name_or_path);
    if (!std::filesystem::exists(path)) throw DataError("dataset '" + name_or_path + "' is neither known nor a file");
    if (label_column.empty()) throw DataError("a label column is required for " + path.string());
    return load_csv(path, label_column);
  }
  const auto path = data_dir / schema->file;
  if (!std::filesystem::exists(path))
    throw DataError("dataset file " + path.string() + " not found; run tools/fetch_datasets.py");
  Dataset ds = load_csv(path, label_column.empty() ? schema->label_column : label_column, schema->drop_columns);
  ds.name = schema->name;
  if (ds.size() + ds.dropped_rows != schema->expected_samples || ds.num_features() != schema->expected_features)
    ds.warnings.push_back("shape " + std::to_string(ds.size() + ds.dropped_rows) + " x " +
                          std::to_string(ds.num_features()) + " differs from the expected " +
                          std::to_string(schema->expected_samples) + " x " + std::to_string(schema->expected_features));
  if (ds.num_classes() != schema->expected_classes)
    ds.warnings.push_back("found " + std::to_string(ds.num_classes()) + " classes, expected " +
                          std::to_string(schema->expected_classes));
  return ds;
}

void MinMaxScaler::fit(const Eigen::MatrixXd &train) {
  if (train.rows() == 0) throw ContractViolation("cannot fit a scaler on zero rows");
  min_ = train.colwise().minCoeff().transpose();
  max_ = train.colwise().maxCoeff().transpose();
}

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::MatrixXd &features) const {
  if (features.cols() != min_.size()) throw ContractViolation("scaler was fit on a different feature count");
  Eigen::MatrixXd out(features.rows(), features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double range = max_(j) - min_(j);
    for (Eigen::Index i = 0; i < features.rows(); ++i)
      out(i, j) = range > 0.0 ? std::clamp((features(i, j) - min_(j)) / range, 0.0, 1.0) : 0.5;
  }
  return out;
}

Eigen::MatrixXd MinMaxScaler::fit_transform(const Eigen::MatrixXd &train) {
  fit(train);
  return transform(train);
}

std::vector<double> pad_features(std::span<const double> x, int n) {
  if (n < 0 || n > 30) throw ContractViolation("qubit count out of range");
  const std::size_t dim = std::size_t{1} << n;
  if (x.size() > dim)
    throw ContractViolation(std::to_string(x.size()) + " features do not fit in " + std::to_string(n) + " qubits");
  std::vector<double> out(dim, 0.0);
  std::copy(x.begin(), x.end(), out.begin());
  return out;
}

std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t count, std::uint64_t seed) {
  if (count > labels.size()) throw ContractViolation("subsample larger than the dataset");
  const int classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  std::vector<std::size_t> quota(classes);
  std::vector<std::pair<double, int>> remainders;
  std::size_t assigned = 0;
  for (int c = 0; c < classes; ++c) {
    const double exact = static_cast<double>(count) * members[c].size() / static_cast<double>(labels.size());
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](auto a, auto b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < count; ++k, ++assigned) ++quota[remainders[k % remainders.size()].second];

  Rng rng(derive_seed(seed, "stratified-subsample"));
  std::vector<std::size_t> out;
  for (int c = 0; c < classes; ++c) {
    auto &m = members[c];
    for (std::size_t i = m.size(); i > 1; --i) std::swap(m[i - 1], m[rng.uniform_index(i)]);
    out.insert(out.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(std::min(quota[c], m.size())));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dataset subsample_stratified(const Dataset &dataset, std::size_t count, std::uint64_t seed) {
  const auto idx = stratified_subsample(dataset.labels, count, seed);
  Dataset out = dataset.subset(idx);
  out.provenance += " (stratified subsample of " + std::to_string(count) + ")";
  return out;
}

Dataset subsample_digits(const Dataset &digits, std::size_t count, std::uint64_t seed) {
  return subsample_stratified(digits, count, seed);
}

}  // namespace qkdist
