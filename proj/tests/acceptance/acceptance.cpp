// Acceptance checks. Each criterion prints one line:
//   PASS|FAIL|SKIP <id> <summary> (<seconds> s)
// Run one criterion with --criterion <id>; with no arguments all run.
// Exit codes for a single criterion: 0 pass, 1 fail, 77 skip.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdist/cv.hpp"
#include "qkdist/data.hpp"
#include "qkdist/encodings.hpp"
#include "qkdist/error.hpp"
#include "qkdist/experiment.hpp"
#include "qkdist/protocol.hpp"
#include "qkdist/svm.hpp"
#include "svm_oracle.hpp"

using namespace qkdist;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

struct Context {
  fs::path data_dir;
  bool full = false;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds;  // <= 0: no limit
  std::function<Outcome(const Context &)> run;
};

std::string fmt(const char *f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> uniform_vec(int n, Rng &rng, double lo, double hi) {
  std::vector<double> v(n);
  for (auto &x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

double state_overlap(const EncodedPoint &a, const EncodedPoint &b) {
  const int n = std::max(a.num_qubits(), b.num_qubits());
  const StateVector sa = StateVector::from_amplitudes(a.register_amplitudes(n));
  const StateVector sb = StateVector::from_amplitudes(b.register_amplitudes(n));
  return overlap(sa, sb).real();
}

Outcome feature_map_exactness(const Context &) {
  Rng rng(101);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform_index(6));
    const int d = 1 + static_cast<int>(rng.uniform_index(4));
    const double a = 0.1 + 1.9 * rng.uniform();
    const double c = 2.0 * rng.uniform();
    const auto x = uniform_vec(n, rng, 0.0, 1.0), y = uniform_vec(n, rng, 0.0, 1.0);
    const EncodedPoint ex = encode_poly(x, a, c, d), ey = encode_poly(y, a, c, d);
    const double k = ex.norm_factor * ey.norm_factor * state_overlap(ex, ey);
    const double target = std::pow(a * dot(x, y) + c, d);
    worst = std::max(worst, std::abs(k - target) / std::abs(target));
  }
  return {worst <= 1e-9 ? Status::Pass : Status::Fail, fmt("max relative error %.3g over 200 draws (tol 1e-9)", worst)};
}

Outcome rff_concentration(const Context &) {
  Rng rng(202);
  const int dim = 4;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  for (int t = 0; t < 100; ++t) pairs.emplace_back(uniform_vec(dim, rng, 0.0, 1.0), uniform_vec(dim, rng, 0.0, 1.0));
  bool ok = true;
  std::string detail;
  for (auto kind : {FeatureMapKind::Rbf, FeatureMapKind::Laplacian}) {
    std::vector<double> medians;
    double max_at_4096 = 0.0;
    for (int D : {64, 256, 1024, 4096}) {
      FeatureMapSpec spec;
      spec.kind = kind;
      spec.input_dim = dim;
      spec.sigma = 1.0;
      spec.alpha = 1.0;
      spec.rff_samples = D;
      const RffDraw draw = sample_rff(spec, derive_seed(202, "acceptance-rff", {static_cast<std::uint64_t>(D)}));
      std::vector<double> errs;
      for (const auto &[x, y] : pairs)
        errs.push_back(std::abs(inner(encode_rff(x, draw, spec), encode_rff(y, draw, spec)) - classical_kernel(x, y, spec)));
      if (D == 4096) max_at_4096 = *std::max_element(errs.begin(), errs.end());
      std::nth_element(errs.begin(), errs.begin() + 50, errs.end());
      medians.push_back(errs[50]);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < medians.size(); ++i) monotone = monotone && medians[i] <= medians[i - 1];
    ok = ok && max_at_4096 <= 0.1 && monotone;
    detail += to_string(kind) + ": max@4096 " + fmt("%.4f", max_at_4096) + ", medians";
    for (double m : medians) detail += fmt(" %.4f", m);
    detail += "; ";
  }
  return {ok ? Status::Pass : Status::Fail, detail + "(tol 0.1, non-increasing medians)"};
}

Outcome teleport_identity(const Context &) {
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(derive_seed(303, "teleport", {static_cast<std::uint64_t>(t)}));
    const int n = 1 + t % 5;
    std::vector<Complex> amps(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &z : amps) {
      z = {rng.normal(), rng.normal()};
      norm += std::norm(z);
    }
    for (auto &z : amps) z /= std::sqrt(norm);
    const StateVector in = StateVector::from_amplitudes(amps);
    std::vector<BellPair> pairs = prepare_bell_pairs(n);
    const TeleportResult r = teleport_register(in, std::span<BellPair>(pairs).first(n), rng);
    worst = std::max(worst, std::abs(std::abs(overlap(in, r.server_register)) - 1.0));
  }
  return {worst <= 1e-10 ? Status::Pass : Status::Fail, fmt("max ||<in|out>| - 1| = %.3g over 100 registers (tol 1e-10)", worst)};
}

Outcome mode_equivalence(const Context &) {
  Rng rng(404);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 3;
    const auto x = uniform_vec(1 << n, rng, 0.0, 1.0), y = uniform_vec(1 << n, rng, 0.0, 1.0);
    FeatureMapSpec spec;
    spec.input_dim = 1 << n;
    SessionConfig cfg;
    cfg.shots = 1;
    cfg.shared_seed = 7;
    cfg.round = static_cast<std::uint64_t>(t);
    cfg.session_seed = static_cast<std::uint64_t>(t);
    const double ps = run_session(x, y, spec, cfg).ancilla_probability;
    cfg.mode = ExecutionMode::FullCircuit;
    const double pf = run_session(x, y, spec, cfg).ancilla_probability;
    worst = std::max(worst, std::abs(ps - pf));
  }
  return {worst <= 1e-9 ? Status::Pass : Status::Fail, fmt("max |P_full - P_stream| = %.3g over 50 pairs (tol 1e-9)", worst)};
}

Outcome swap_estimator(const Context &) {
  Rng rng(505);
  int within = 0;
  for (int t = 0; t < 20; ++t) {
    const auto x = uniform_vec(8, rng, 0.0, 1.0), y = uniform_vec(8, rng, 0.0, 1.0);
    FeatureMapSpec spec;
    spec.input_dim = 8;
    SessionConfig cfg;
    cfg.shots = 1024;
    cfg.session_seed = derive_seed(505, "swap", {static_cast<std::uint64_t>(t)});
    const ProtocolTranscript tr = run_session(x, y, spec, cfg);
    const double p = tr.ancilla_probability;
    const double bound = 4.0 * std::sqrt(p * (1.0 - p) / 1024.0) * 2.0;
    within += std::abs(tr.estimate - (2.0 * p - 1.0)) <= bound;
  }
  return {within >= 19 ? Status::Pass : Status::Fail, std::to_string(within) + "/20 pairs within 8 sigma (need >= 19)"};
}

// Loads a dataset or returns nullopt when its CSV is absent.
std::optional<Dataset> try_load(const Context &ctx, const std::string &name) {
  const auto schema = find_schema(name);
  if (schema && !fs::exists(ctx.data_dir / schema->file)) return std::nullopt;
  return load_dataset(name, ctx.data_dir);
}

ExperimentConfig cell(const Context &ctx, const std::string &dataset) {
  ExperimentConfig c;
  c.dataset = dataset;
  c.data_dir = ctx.data_dir.string();
  return c;
}

Outcome skip_missing(const std::string &file) {
  return {Status::Skip, file + " not found; run tools/fetch_datasets.py or place the file by hand"};
}

Outcome wine_classical(const Context &ctx) {
  if (!try_load(ctx, "wine")) return skip_missing("wine.csv");
  const ResultRow r = run_experiment(cell(ctx, "wine"));
  return {r.mean >= 0.93 ? Status::Pass : Status::Fail,
          fmt("classical linear kSVM 5-fold %.4f", r.mean) + fmt(" +- %.4f (need >= 0.93)", r.stddev)};
}

Outcome wine_protocol(const Context &ctx) {
  if (!try_load(ctx, "wine")) return skip_missing("wine.csv");
  ExperimentConfig c = cell(ctx, "wine");
  c.mode = GramSource::Protocol;
  const ResultRow headline = run_experiment(c);
  c.convention = KernelConvention::Fidelity;
  const ResultRow alt = run_experiment(c);
  const bool ok = headline.mean >= 0.80 && headline.mean <= 0.95;
  return {ok ? Status::Pass : Status::Fail, fmt("protocol 1024 shots sqrt_fidelity %.4f", headline.mean) +
                                               fmt(" +- %.4f", headline.stddev) +
                                               fmt(", fidelity %.4f (band [0.80, 0.95])", alt.mean)};
}

Outcome parkinsons_protocol(const Context &ctx) {
  if (!try_load(ctx, "parkinsons")) return skip_missing("parkinsons.csv");
  ExperimentConfig c = cell(ctx, "parkinsons");
  c.mode = GramSource::Protocol;
  const ResultRow r = run_experiment(c);
  const bool ok = r.mean >= 0.70 && r.mean <= 0.90;
  return {ok ? Status::Pass : Status::Fail, fmt("protocol kSVM %.4f", r.mean) + fmt(" +- %.4f (band [0.70, 0.90])", r.stddev)};
}

Outcome digits_shot_trend(const Context &ctx) {
  if (!try_load(ctx, "digits")) return skip_missing("digits.csv");
  ExperimentConfig c = cell(ctx, "digits");
  c.sample_cap = 100;
  const ResultRow classical = run_experiment(c);
  c.mode = GramSource::Protocol;
  c.shots = 128;
  const ResultRow low = run_experiment(c);
  c.shots = 1024;
  const ResultRow high = run_experiment(c);
  const bool ok = high.mean >= low.mean + 0.05 && high.mean >= 0.70;
  return {ok ? Status::Pass : Status::Fail, fmt("Digits-100 protocol 128 shots %.4f", low.mean) +
                                               fmt(", 1024 shots %.4f", high.mean) +
                                               fmt(", classical %.4f (need +0.05 and >= 0.70)", classical.mean)};
}

Outcome heart_noise_ordering(const Context &ctx) {
  if (!try_load(ctx, "heart")) return skip_missing("framingham.csv");
  ExperimentConfig c = cell(ctx, "heart");
  c.mode = GramSource::Protocol;
  c.sample_cap = ctx.full ? 600 : 150;
  const ResultRow clean = run_experiment(c);
  c.noise = NoiseLevel::L2;
  const ResultRow noisy = run_experiment(c);
  const bool ok = clean.mean >= noisy.mean + 0.02;
  return {ok ? Status::Pass : Status::Fail, fmt("Heart kSVM cap %.0f", static_cast<double>(*c.sample_cap)) +
                                               fmt(": no noise %.4f", clean.mean) +
                                               fmt(", level 2 %.4f (need gap >= 0.02)", noisy.mean)};
}

Outcome security(const Context &) {
  Rng rng(909);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto x = uniform_vec(16, rng, 0.0, 1.0), y = uniform_vec(16, rng, 0.0, 1.0);
    FeatureMapSpec spec;
    spec.input_dim = 16;
    SessionConfig cfg;
    cfg.shots = 1;
    cfg.shared_seed = 31337;
    cfg.round = static_cast<std::uint64_t>(t);
    cfg.obfuscate = true;
    const double on = run_session(x, y, spec, cfg).ancilla_probability;
    cfg.obfuscate = false;
    const double off = run_session(x, y, spec, cfg).ancilla_probability;
    worst = std::max(worst, std::abs(on - off));
  }
  const int n = 4, sessions = 500;
  int detected = 0;
  for (int s = 0; s < sessions; ++s) {
    SessionConfig cfg;
    cfg.qubits = n;
    cfg.adversary = true;
    cfg.decoy_seed = 4242;
    cfg.round = static_cast<std::uint64_t>(s);
    cfg.session_seed = derive_seed(909, "decoy", {static_cast<std::uint64_t>(s)});
    detected += !run_decoy_session(cfg).pass;
  }
  const double p = intercept_resend_detection_probability(n);
  const double rate = detected / static_cast<double>(sessions);
  const double sigma = std::sqrt(p * (1.0 - p) / sessions);
  const bool ok = worst <= 1e-12 && std::abs(rate - p) <= 4.0 * sigma;
  return {ok ? Status::Pass : Status::Fail, fmt("obfuscation max |dP| %.3g (tol 1e-12); ", worst) +
                                               fmt("detection %.4f", rate) + fmt(" vs 1-(3/4)^4 = %.4f", p) +
                                               fmt(" (4 sigma = %.4f)", 4.0 * sigma)};
}

Outcome svm_oracle(const Context &) {
  Rng rng(1010);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd x(6, 3);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    std::vector<int> y(6);
    for (int i = 0; i < 6; ++i) y[i] = i < 2 ? (i == 0 ? 1 : -1) : (rng.bernoulli(0.5) ? 1 : -1);
    const Eigen::MatrixXd k = x * x.transpose();
    const BinarySvm s = train_binary_svm(k, y);
    Eigen::VectorXd yv(6);
    for (int i = 0; i < 6; ++i) yv(i) = y[i];
    const auto ref = oracle::brute_force_dual(k, yv, 1.0);
    worst = std::max(worst, std::abs(s.objective - ref.objective));
  }
  return {worst <= 1e-4 ? Status::Pass : Status::Fail, fmt("max |objective - brute force| = %.3g over 20 problems (tol 1e-4)", worst)};
}

const std::vector<Criterion> &criteria() {
  static const std::vector<Criterion> all = {
      {"1", "feature-map exactness", 10, feature_map_exactness},
      {"2", "RFF concentration", 30, rff_concentration},
      {"3", "teleportation identity", 30, teleport_identity},
      {"4", "mode equivalence", 60, mode_equivalence},
      {"5", "swap-test estimator", 60, swap_estimator},
      {"6a", "Wine classical kSVM", 0, wine_classical},
      {"6b", "Wine protocol band", 0, wine_protocol},
      {"6c", "Parkinson's protocol band", 0, parkinsons_protocol},
      {"7", "Digits-100 shot trend", 1800, digits_shot_trend},
      {"8", "Heart noise ordering", 0, heart_noise_ordering},
      {"9", "security properties", 300, security},
      {"10", "SVM solver oracle", 10, svm_oracle},
  };
  return all;
}

Status run_one(const Criterion &c, const Context &ctx) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run(ctx);
  } catch (const std::exception &e) {
    o = {Status::Fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.status == Status::Pass && c.budget_seconds > 0 && secs > c.budget_seconds) {
    o.status = Status::Fail;
    o.detail += fmt("; runtime over the %.0f s budget", c.budget_seconds);
  }
  const char *tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
  std::printf("%s %-3s %s: %s (%.1f s)\n", tag, c.id.c_str(), c.title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
  return o.status;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"qkdist acceptance checks"};
  std::string only;
  Context ctx;
  std::string data_dir = QKDIST_DEFAULT_DATA_DIR;
  app.add_option("--criterion", only, "run a single criterion (1, 2, ..., 6a, 6b, 6c, ..., 10)");
  app.add_option("--data-dir", data_dir, "dataset directory");
  app.add_flag("--full", ctx.full, "criterion 8 at the full 600-sample cap instead of the smoke cap of 150");
  CLI11_PARSE(app, argc, argv);
  ctx.data_dir = data_dir;

  if (!only.empty()) {
    for (const auto &c : criteria())
      if (c.id == only) {
        const Status s = run_one(c, ctx);
        return s == Status::Pass ? 0 : s == Status::Skip ? 77 : 1;
      }
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  int failed = 0;
  for (const auto &c : criteria()) failed += run_one(c, ctx) == Status::Fail;
  return failed == 0 ? 0 : 1;
}
