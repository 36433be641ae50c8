#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkdist/error.hpp"
#include "qkdist/experiment.hpp"

using namespace qkdist;
namespace fs = std::filesystem;

namespace {

fs::path toy_data_dir() {
  const fs::path dir = fs::temp_directory_path() / "qkdist_unit_experiment";
  fs::create_directories(dir);
  std::ofstream out(dir / "toy.csv");
  out << "a,b,c,label\n";
  Rng rng(1);
  for (int i = 0; i < 40; ++i) {
    const int y = i % 2;
    out << (y ? 3.0 : 1.0) + 0.3 * rng.normal() << ',' << (y ? 1.0 : 3.0) + 0.3 * rng.normal() << ','
        << rng.uniform() << ',' << y << '\n';
  }
  return dir;
}

std::string read_file(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing, defaults and round trip") {
  const ExperimentConfig c = parse_config(R"({"dataset": "wine", "mode": "protocol", "shots": 256,
      "kernel": {"kind": "poly", "degree": 2, "c": 1.0}, "noise": "l1", "seed": 9})");
  CHECK(c.mode == GramSource::Protocol);
  CHECK(c.shots == 256);
  CHECK(c.kernel.kind == FeatureMapKind::Poly);
  CHECK(c.noise == NoiseLevel::L1);
  CHECK(c.folds == 5);
  CHECK(c.C == 1.0);
  const ExperimentConfig back = parse_config(to_json(c));
  CHECK(config_digest(back) == config_digest(c));
  ExperimentConfig other = c;
  other.seed = 10;
  CHECK(config_digest(other) != config_digest(c));
  other = c;
  other.workers = 8;
  CHECK(config_digest(other) == config_digest(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"datset": "wine"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"mode": "magic"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"shots": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"shots": "many"})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent.json"), ConfigError);
}

TEST_CASE("default sample cap applies to large protocol runs only") {
  ExperimentConfig c;
  CHECK(c.effective_cap(4238) == 0);
  c.mode = GramSource::Protocol;
  CHECK(c.effective_cap(4238) == 600);
  CHECK(c.effective_cap(178) == 0);
  c.sample_cap = 100;
  CHECK(c.effective_cap(4238) == 100);
  c.sample_cap = 0;
  CHECK(c.effective_cap(4238) == 0);
}

TEST_CASE("run_experiment on a CSV path") {
  const fs::path dir = toy_data_dir();
  ExperimentConfig c;
  c.dataset = (dir / "toy.csv").string();
  c.label_column = "label";
  const ResultRow r = run_experiment(c, "toy");
  CHECK(r.status == "ok");
  CHECK(r.samples == 40);
  CHECK(r.mean > 0.9);
  CHECK(r.fold_accuracies.size() == 5);
  const ResultRow parsed = parse_result_row(to_csv(r));
  CHECK(to_csv(parsed) == to_csv(r));
}

TEST_CASE("invalid dataset path raises a data error") {
  ExperimentConfig c;
  c.dataset = "/nonexistent/data.csv";
  c.label_column = "y";
  CHECK_THROWS_AS(run_experiment(c), DataError);
}

TEST_CASE("suite grids") {
  const auto t1 = suite_cells("table1");
  CHECK(t1.size() == 25);
  const auto f3 = suite_cells("figure3");
  CHECK(f3.size() == 20);
  const auto f4 = suite_cells("figure4");
  REQUIRE(f4.size() == 5);
  CHECK(f4[1].config.shots == 128);
  CHECK(f4[4].config.shots == 1024);
  CHECK(*f4[4].config.sample_cap == 100);
  CHECK_THROWS_AS(suite_cells("figure9"), ConfigError);
}

TEST_CASE("suite rerun skips completed cells and is byte-identical") {
  const fs::path out = fs::temp_directory_path() / "qkdist_unit_suite";
  fs::remove_all(out);
  const fs::path data = fs::temp_directory_path() / "qkdist_unit_suite_data";
  fs::create_directories(data);
  {
    // Digits-like stand-in: 10 classes, 64 features, 120 rows.
    std::ofstream f(data / "digits.csv");
    for (int j = 0; j < 64; ++j) f << "p" << j << ',';
    f << "target\n";
    Rng rng(2);
    for (int i = 0; i < 120; ++i) {
      const int y = i % 10;
      for (int j = 0; j < 64; ++j) f << (j % 10 == y ? 8.0 : 1.0) + rng.uniform() << ',';
      f << y << '\n';
    }
  }
  SuiteOptions opt;
  opt.suite = "figure4";
  opt.out_dir = out;
  opt.data_dir = data;
  const SuiteSummary first = run_suite(opt);
  CHECK(first.completed == 5);
  CHECK(first.failed == 0);
  const std::string rows = read_file(first.results);
  const SuiteSummary second = run_suite(opt);
  CHECK(second.skipped == 5);
  CHECK(second.completed == 0);
  CHECK(read_file(second.results) == rows);
  const std::string plot = read_file(first.plot_data);
  CHECK(plot.rfind("series,x,y,err\n", 0) == 0);
  CHECK(plot.find("protocol,1024,") != std::string::npos);
}

TEST_CASE("failing cells are recorded and the suite continues") {
  const fs::path out = fs::temp_directory_path() / "qkdist_unit_suite_fail";
  fs::remove_all(out);
  SuiteOptions opt;
  opt.suite = "figure4";
  opt.out_dir = out;
  opt.data_dir = "/nonexistent";
  const SuiteSummary s = run_suite(opt);
  CHECK(s.failed == 5);
  const std::string rows = read_file(s.results);
  CHECK(rows.find(",error,data: ") != std::string::npos);
}

TEST_CASE("validation report") {
  ExperimentConfig c;
  c.dataset = "wine";
  c.data_dir = "/nonexistent";
  c.mode = GramSource::Protocol;
  const ValidationReport r = validate_config(c);
  CHECK(r.ok);
  CHECK(r.pairs == 15753);
  CHECK(r.qubits == 4);
  CHECK(r.streaming_qubits == 11);
  CHECK(r.full_circuit_qubits == 25);

  c.dataset = "heart";
  const ValidationReport h = validate_config(c);
  CHECK(h.samples == 600);

  c.dataset = "wine";
  c.qubits = 7;
  c.execution = ExecutionMode::FullCircuit;
  const ValidationReport full = validate_config(c);
  CHECK_FALSE(full.ok);
  CHECK(full.full_circuit_qubits == 43);
  c.execution = ExecutionMode::Streaming;
  const ValidationReport stream = validate_config(c);
  CHECK(stream.ok);
  CHECK(stream.streaming_qubits == 17);
  CHECK(stream.total_shots == stream.sessions * 1024);
}
