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


#include "qkdist/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "qkdist/data.hpp"
#include "qkdist/error.hpp"
#include "qkdist/rng.hpp"

namespace qkdist {

using nlohmann::ordered_json;

std::size_t ExperimentConfig::effective_cap(std::size_t size) const {
  if (sample_cap) return *sample_cap >= size ? 0 : *sample_cap;
  if (mode == GramSource::Protocol && size > kDefaultProtocolCap) return kDefaultProtocolCap;
  return 0;
}

namespace {

template <typename T>
void read(const nlohmann::json &j, const char *key, T &out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

FeatureMapSpec parse_kernel(const nlohmann::json &j) {
  FeatureMapSpec k;
  if (j.is_string()) {
    k.kind = feature_map_kind_from_string(j.get<std::string>());
    return k;
  }
  if (!j.is_object()) throw ConfigError("config key 'kernel' must be a string or an object");
  static const std::vector<std::string> allowed = {"kind", "degree", "a", "c", "sigma", "alpha", "rff_samples"};
  for (const auto &[key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
    else throw ConfigError("unknown kernel key '" + key + "'");
  std::string kind = "linear";
  read(j, "kind", kind);
  k.kind = feature_map_kind_from_string(kind);
  read(j, "degree", k.degree);
  read(j, "a", k.a);
  read(j, "c", k.c);
  read(j, "sigma", k.sigma);
  read(j, "alpha", k.alpha);
  read(j, "rff_samples", k.rff_samples);
  return k;
}

ordered_json kernel_json(const FeatureMapSpec &k) {
  return {{"kind", to_string(k.kind)}, {"degree", k.degree}, {"a", k.a},
          {"c", k.c},                  {"sigma", k.sigma},   {"alpha", k.alpha},
          {"rff_samples", k.rff_samples}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string default_method(const ExperimentConfig &c) {
  return c.model == ModelKind::Svm ? "kernel-SVM" : "kernel-PCA(" + std::to_string(c.kpca_components) + ")";
}

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string quote(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

}  // namespace

ExperimentConfig parse_config(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> allowed = {
      "dataset",  "label_column",    "data_dir", "method",   "kernel",     "mode",     "convention",
      "shots",    "noise",           "folds",    "model",    "kpca_components", "C", "tolerance",
      "max_passes", "seed",          "sample_cap", "qubits", "execution",  "decoy_interval", "adversary",
      "obfuscate", "per_shot",       "normalize", "workers", "transcripts"};
  for (const auto &[key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig c;
  read(j, "dataset", c.dataset);
  read(j, "label_column", c.label_column);
  read(j, "data_dir", c.data_dir);
  read(j, "method", c.method);
  if (j.contains("kernel")) c.kernel = parse_kernel(j["kernel"]);
  std::string text;
  if (j.contains("mode")) {
    read(j, "mode", text);
    c.mode = gram_source_from_string(text);
  }
  if (j.contains("convention")) {
    read(j, "convention", text);
    c.convention = kernel_convention_from_string(text);
  }
  read(j, "shots", c.shots);
  if (j.contains("noise")) {
    read(j, "noise", text);
    c.noise = noise_level_from_string(text);
  }
  read(j, "folds", c.folds);
  if (j.contains("model")) {
    read(j, "model", text);
    c.model = model_kind_from_string(text);
  }
  read(j, "kpca_components", c.kpca_components);
  read(j, "C", c.C);
  read(j, "tolerance", c.tolerance);
  read(j, "max_passes", c.max_passes);
  read(j, "seed", c.seed);
  if (j.contains("sample_cap") && !j["sample_cap"].is_null()) {
    std::size_t cap = 0;
    read(j, "sample_cap", cap);
    c.sample_cap = cap;
  }
  read(j, "qubits", c.qubits);
  if (j.contains("execution")) {
    read(j, "execution", text);
    c.execution = execution_mode_from_string(text);
  }
  read(j, "decoy_interval", c.decoy_interval);
  read(j, "adversary", c.adversary);
  read(j, "obfuscate", c.obfuscate);
  read(j, "per_shot", c.per_shot);
  read(j, "normalize", c.normalize);
  read(j, "workers", c.workers);
  read(j, "transcripts", c.transcripts);

  if (c.shots < 1) throw ConfigError("shots must be >= 1");
  if (c.folds < 2) throw ConfigError("folds must be >= 2");
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (c.decoy_interval < 0) throw ConfigError("decoy_interval must be >= 0");
  if (c.qubits < 0) throw ConfigError("qubits must be >= 0");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

ordered_json result_fields(const ExperimentConfig &c) {
  ordered_json j;
  j["dataset"] = c.dataset;
  j["label_column"] = c.label_column;
  j["method"] = c.method;
  j["kernel"] = kernel_json(c.kernel);
  j["mode"] = to_string(c.mode);
  j["convention"] = to_string(c.convention);
  j["shots"] = c.shots;
  j["noise"] = to_string(c.noise);
  j["folds"] = c.folds;
  j["model"] = to_string(c.model);
  j["kpca_components"] = c.kpca_components;
  j["C"] = c.C;
  j["tolerance"] = c.tolerance;
  j["max_passes"] = c.max_passes;
  j["seed"] = c.seed;
  j["sample_cap"] = c.sample_cap ? ordered_json(*c.sample_cap) : ordered_json(nullptr);
  j["qubits"] = c.qubits;
  j["execution"] = to_string(c.execution);
  j["decoy_interval"] = c.decoy_interval;
  j["adversary"] = c.adversary;
  j["obfuscate"] = c.obfuscate;
  j["per_shot"] = c.per_shot;
  j["normalize"] = c.normalize;
  return j;
}

}  // namespace

std::string to_json(const ExperimentConfig &config) {
  ordered_json j = result_fields(config);
  j["data_dir"] = config.data_dir;
  j["workers"] = config.workers;
  j["transcripts"] = config.transcripts;
  return j.dump(2);
}

std::string config_digest(const ExperimentConfig &config) { return hex_digest(result_fields(config).dump()); }

PipelineConfig pipeline_config(const ExperimentConfig &c) {
  PipelineConfig p;
  p.kernel = c.kernel;
  p.mode = c.mode;
  p.convention = c.convention;
  p.session.qubits = c.qubits;
  p.session.shots = c.shots;
  p.session.noise = NoiseModel::from_level(c.noise);
  p.session.mode = c.execution;
  p.session.obfuscate = c.obfuscate;
  p.session.adversary = c.adversary;
  p.session.per_shot_execution = c.per_shot;
  p.model = c.model;
  p.kpca_components = c.kpca_components;
  p.svm.C = c.C;
  p.svm.tolerance = c.tolerance;
  p.svm.max_passes = c.max_passes;
  p.workers = c.workers;
  p.decoy_interval = c.decoy_interval;
  p.normalize = c.normalize;
  return p;
}

std::string result_csv_header() {
  return "cell,dataset,method,mode,kernel,convention,shots,noise,folds,samples,sample_cap,mean,std,"
         "fold_accuracies,seed,digest,sessions,status,error";
}

std::string to_csv(const ResultRow &r) {
  std::string folds;
  for (std::size_t i = 0; i < r.fold_accuracies.size(); ++i) folds += (i ? ";" : "") + fmt(r.fold_accuracies[i]);
  std::ostringstream os;
  os << quote(r.cell) << ',' << quote(r.dataset) << ',' << quote(r.method) << ',' << r.mode << ',' << r.kernel << ','
     << r.convention << ',' << r.shots << ',' << r.noise << ',' << r.folds << ',' << r.samples << ','
     << r.sample_cap << ',' << fmt(r.mean) << ',' << fmt(r.stddev) << ',' << folds << ',' << r.seed << ','
     << r.digest << ',' << r.sessions << ',' << r.status << ',' << quote(r.error);
  return os.str();
}

ResultRow parse_result_row(const std::string &line) {
  const auto f = split_csv(line);
  if (f.size() != 19) throw DataError("result row has " + std::to_string(f.size()) + " fields, expected 19");
  ResultRow r;
  try {
    r.cell = f[0];
    r.dataset = f[1];
    r.method = f[2];
    r.mode = f[3];
    r.kernel = f[4];
    r.convention = f[5];
    r.shots = std::stoi(f[6]);
    r.noise = f[7];
    r.folds = std::stoi(f[8]);
    r.samples = std::stoul(f[9]);
    r.sample_cap = std::stoul(f[10]);
    r.mean = std::stod(f[11]);
    r.stddev = std::stod(f[12]);
    std::stringstream ss(f[13]);
    for (std::string a; std::getline(ss, a, ';');)
      if (!a.empty()) r.fold_accuracies.push_back(std::stod(a));
    r.seed = std::stoull(f[14]);
    r.digest = f[15];
    r.sessions = std::stoul(f[16]);
    r.status = f[17];
    r.error = f[18];
  } catch (const std::logic_error &) {
    throw DataError("malformed result row: " + line);
  }
  return r;
}

namespace {

ResultRow row_skeleton(const ExperimentConfig &c, const std::string &cell) {
  ResultRow r;
  r.cell = cell;
  r.dataset = c.dataset;
  r.method = c.method.empty() ? default_method(c) : c.method;
  r.mode = to_string(c.mode);
  r.kernel = to_string(c.kernel.kind);
  r.convention = c.mode == GramSource::ExactClassical ? "-" : to_string(c.convention);
  r.shots = c.mode == GramSource::Protocol ? c.shots : 0;
  r.noise = c.mode == GramSource::Protocol ? to_string(c.noise) : "none";
  r.folds = c.folds;
  r.seed = c.seed;
  r.digest = config_digest(c);
  return r;
}

Dataset load_capped(const ExperimentConfig &c, std::size_t &cap) {
  Dataset ds = load_dataset(c.dataset, c.data_dir, c.label_column);
  cap = c.effective_cap(ds.size());
  if (cap > 0) ds = subsample_stratified(ds, cap, derive_seed(c.seed, "subsample"));
  return ds;
}

}  // namespace

ResultRow run_experiment(const ExperimentConfig &config, const std::string &cell, TranscriptSink *sink) {
  const auto start = std::chrono::steady_clock::now();
  ResultRow row = row_skeleton(config, cell);
  std::size_t cap = 0;
  const Dataset ds = load_capped(config, cap);
  row.samples = ds.size();
  row.sample_cap = cap;

  PipelineConfig p = pipeline_config(config);
  std::unique_ptr<std::ofstream> transcript_file;
  std::unique_ptr<TranscriptSink> own_sink;
  if (sink == nullptr && !config.transcripts.empty() && config.mode == GramSource::Protocol) {
    transcript_file = std::make_unique<std::ofstream>(config.transcripts, std::ios::app);
    if (!*transcript_file) throw ConfigError("cannot open transcript file " + config.transcripts);
    own_sink = std::make_unique<TranscriptSink>(*transcript_file);
    sink = own_sink.get();
  }
  p.sink = sink;
  const CvReport report = stratified_cv(ds, p, config.folds, config.seed);
  row.mean = report.mean;
  row.stddev = report.stddev;
  row.fold_accuracies = report.fold_accuracies;
  row.sessions = report.sessions;
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

namespace {

struct CellTemplate {
  std::string dataset;
  ModelKind model;
  int k;
  std::string label;
};

ExperimentConfig base_config(const CellTemplate &t) {
  ExperimentConfig c;
  c.dataset = t.dataset;
  c.model = t.model;
  c.kpca_components = t.k;
  return c;
}

std::string model_tag(const CellTemplate &t) {
  return t.model == ModelKind::Svm ? "svm" : "kpca" + std::to_string(t.k);
}

}  // namespace

std::vector<SuiteCell> suite_cells(const std::string &suite, bool smoke) {
  std::vector<SuiteCell> cells;
  if (suite == "table1") {
    const std::vector<CellTemplate> rows = {{"wine", ModelKind::Svm, 5, "Wine"},
                                            {"parkinsons", ModelKind::Svm, 5, "Parkinsons"},
                                            {"parkinsons", ModelKind::KpcaSvm, 5, "Parkinsons"},
                                            {"heart", ModelKind::Svm, 5, "Heart"},
                                            {"heart", ModelKind::KpcaSvm, 5, "Heart"}};
    for (const auto &t : rows) {
      const std::string x = t.label + " " + (t.model == ModelKind::Svm ? "kernel-SVM" : "kernel-PCA");
      const std::string prefix = t.dataset + "/" + model_tag(t) + "/";
      ExperimentConfig c = base_config(t);
      if (smoke) c.sample_cap = t.dataset == "heart" ? 150 : 60;
      cells.push_back({prefix + "classical", "centralised-classical", x, c});
      for (auto conv : {KernelConvention::SqrtFidelity, KernelConvention::Fidelity}) {
        ExperimentConfig q = c;
        q.mode = GramSource::ExactQuantum;
        q.convention = conv;
        cells.push_back({prefix + "exact_quantum/" + to_string(conv), "centralised-quantum-" + to_string(conv), x, q});
        q.mode = GramSource::Protocol;
        cells.push_back({prefix + "protocol/" + to_string(conv), "distributed-quantum-" + to_string(conv), x, q});
      }
    }
  } else if (suite == "figure3") {
    const std::vector<CellTemplate> cats = {{"heart", ModelKind::Svm, 5, "Heart Study (kSVM)"},
                                            {"parkinsons", ModelKind::Svm, 5, "Parkinsons (kSVM)"},
                                            {"parkinsons", ModelKind::KpcaSvm, 5, "Parkinsons (5-kPCA)"},
                                            {"parkinsons", ModelKind::KpcaSvm, 6, "Parkinsons (6-kPCA)"},
                                            {"parkinsons", ModelKind::KpcaSvm, 7, "Parkinsons (7-kPCA)"}};
    for (const auto &t : cats) {
      const std::string prefix = t.dataset + "/" + model_tag(t) + "/";
      ExperimentConfig c = base_config(t);
      if (smoke) c.sample_cap = t.dataset == "heart" ? 150 : 100;
      cells.push_back({prefix + "classical", "classical", t.label, c});
      for (auto level : {NoiseLevel::None, NoiseLevel::L1, NoiseLevel::L2}) {
        ExperimentConfig q = c;
        q.mode = GramSource::Protocol;
        q.noise = level;
        cells.push_back({prefix + "protocol/" + to_string(level), "quantum-" + to_string(level), t.label, q});
      }
    }
  } else if (suite == "figure4") {
    ExperimentConfig c;
    c.dataset = "digits";
    c.sample_cap = 100;
    cells.push_back({"digits100/svm/classical", "classical", "baseline", c});
    for (int shots : {128, 256, 512, 1024}) {
      ExperimentConfig q = c;
      q.mode = GramSource::Protocol;
      q.shots = shots;
      cells.push_back({"digits100/svm/protocol/" + std::to_string(shots), "protocol", std::to_string(shots), q});
    }
  } else {
    throw ConfigError("unknown suite '" + suite + "' (expected table1, figure3 or figure4)");
  }
  return cells;
}

namespace {

std::map<std::string, ResultRow> read_previous(const std::filesystem::path &path) {
  std::map<std::string, ResultRow> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      ResultRow r = parse_result_row(line);
      if (r.status == "ok") out[r.digest] = r;
    } catch (const DataError &) {
      // A torn trailing line from an interrupted run; the cell reruns.
    }
  }
  return out;
}

std::map<std::string, std::string> read_timings(const std::filesystem::path &path) {
  std::map<std::string, std::string> out;
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto f = split_csv(line);
    if (f.size() == 3) out[f[1]] = f[2];
  }
  return out;
}

void write_atomically(const std::filesystem::path &path, const std::string &text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

SuiteSummary run_suite(const SuiteOptions &options) {
  std::vector<SuiteCell> cells = suite_cells(options.suite, options.smoke);
  const std::string stem = options.suite + (options.smoke ? "_smoke" : "");
  std::filesystem::create_directories(options.out_dir);
  SuiteSummary summary;
  summary.cells = cells.size();
  summary.results = options.out_dir / (stem + ".csv");
  summary.plot_data = options.out_dir / (stem + "_plot.csv");
  const auto timings_path = options.out_dir / (stem + "_timings.csv");

  for (auto &cell : cells) {
    cell.config.data_dir = options.data_dir.string();
    if (options.seed) cell.config.seed = *options.seed;
    cell.config.workers = 1;
  }
  const auto previous = read_previous(summary.results);
  auto timings = read_timings(timings_path);

  std::vector<ResultRow> rows(cells.size());
  std::vector<char> done(cells.size(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto it = previous.find(config_digest(cells[i].config));
    if (it != previous.end()) {
      rows[i] = it->second;
      rows[i].cell = cells[i].name;
      done[i] = 1;
      ++summary.skipped;
      if (options.progress) options.progress(rows[i], true);
    }
  }

  // Fresh rows are appended as they finish so an interrupted suite resumes.
  std::mutex io;
  const bool fresh_file = !std::filesystem::exists(summary.results);
  std::ofstream append(summary.results, std::ios::app);
  if (!append) throw ConfigError("cannot write " + summary.results.string());
  if (fresh_file) append << result_csv_header() << '\n' << std::flush;

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      if (done[i]) continue;
      ResultRow row;
      try {
        row = run_experiment(cells[i].config, cells[i].name);
      } catch (const std::exception &e) {
        row = row_skeleton(cells[i].config, cells[i].name);
        row.status = "error";
        const auto *qe = dynamic_cast<const Error *>(&e);
        row.error = std::string(qe ? qe->kind() : "internal") + ": " + e.what();
      }
      std::lock_guard lock(io);
      rows[i] = row;
      append << to_csv(row) << '\n' << std::flush;
      if (row.status == "ok") {
        ++summary.completed;
        timings[row.digest] = fmt(row.wall_seconds);
      } else {
        ++summary.failed;
      }
      if (options.progress) options.progress(row, false);
    }
  };
  const int threads = std::max(1, std::min<int>(options.workers, static_cast<int>(cells.size())));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
  }
  append.close();

  std::string text = result_csv_header() + "\n";
  for (const auto &r : rows) text += to_csv(r) + "\n";
  write_atomically(summary.results, text);

  std::string ttext = "cell,digest,wall_s\n";
  for (const auto &r : rows)
    if (timings.count(r.digest)) ttext += quote(r.cell) + "," + r.digest + "," + timings[r.digest] + "\n";
  write_atomically(timings_path, ttext);

  std::string plot = "series,x,y,err\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (rows[i].status != "ok") continue;
    plot += quote(cells[i].series) + "," + quote(cells[i].x) + "," + fmt(rows[i].mean) + "," + fmt(rows[i].stddev) + "\n";
  }
  write_atomically(summary.plot_data, plot);
  return summary;
}

std::string ValidationReport::to_json() const {
  ordered_json j;
  j["ok"] = ok;
  j["qubits"] = qubits;
  j["streaming_qubits"] = streaming_qubits;
  j["full_circuit_qubits"] = full_circuit_qubits;
  j["capacity"] = capacity;
  j["samples"] = samples;
  j["pairs"] = pairs;
  j["sessions"] = sessions;
  j["total_shots"] = total_shots;
  j["messages"] = messages;
  return j.dump(2);
}

ValidationReport validate_config(const ExperimentConfig &config, int capacity) {
  ValidationReport r;
  r.capacity = capacity;
  std::size_t m = 0;
  int features = 0;
  try {
    const Dataset ds = load_dataset(config.dataset, config.data_dir, config.label_column);
    m = ds.size();
    features = ds.num_features();
  } catch (const DataError &e) {
    const auto schema = find_schema(config.dataset);
    if (!schema) {
      r.ok = false;
      r.messages.push_back(e.what());
      return r;
    }
    m = schema->expected_samples;
    features = schema->expected_features;
    r.messages.push_back("dataset not found locally; using the documented shape " + std::to_string(m) + " x " +
                         std::to_string(features));
  }
  const std::size_t cap = config.effective_cap(m);
  if (cap > 0) {
    m = cap;
    r.messages.push_back("sample cap " + std::to_string(cap) + " applied");
  }
  r.samples = m;
  r.pairs = m * (m - 1) / 2;

  FeatureMapSpec spec = config.kernel;
  spec.input_dim = std::max(features, 1);
  try {
    spec.validate(capacity);
    r.qubits = config.qubits > 0 ? config.qubits : spec.num_qubits();
  } catch (const Error &e) {
    r.ok = false;
    r.messages.push_back(e.what());
    return r;
  }
  r.streaming_qubits = 2 * r.qubits + 3;
  r.full_circuit_qubits = 6 * r.qubits + 1;

  if (config.mode == GramSource::Protocol) {
    const int needed = config.execution == ExecutionMode::FullCircuit ? r.full_circuit_qubits : r.streaming_qubits;
    if (needed > capacity) {
      r.ok = false;
      r.messages.push_back(to_string(config.execution) + " execution needs " + std::to_string(needed) +
                           " qubits, capacity is " + std::to_string(capacity));
    }
    // Per fold: train-train pairs plus train-test pairs.
    const auto folds = static_cast<std::size_t>(config.folds);
    for (std::size_t f = 0; f < folds; ++f) {
      const std::size_t test = m / folds + (f < m % folds ? 1 : 0);
      const std::size_t train = m - test;
      r.sessions += train * (train - 1) / 2 + train * test;
    }
    r.total_shots = static_cast<std::uint64_t>(r.sessions) * static_cast<std::uint64_t>(config.shots);
  }
  return r;
}

}  // namespace qkdist
