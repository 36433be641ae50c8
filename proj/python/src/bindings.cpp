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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qkdist/cv.hpp"
#include "qkdist/data.hpp"
#include "qkdist/encodings.hpp"
#include "qkdist/error.hpp"
#include "qkdist/experiment.hpp"
#include "qkdist/gram.hpp"
#include "qkdist/kpca.hpp"
#include "qkdist/protocol.hpp"
#include "qkdist/svm.hpp"

namespace py = pybind11;
using namespace qkdist;

namespace {

FeatureMapSpec make_spec(const std::string &kind, int input_dim, int degree, double a, double c, double sigma,
                         double alpha, int rff_samples) {
  FeatureMapSpec s;
  s.kind = feature_map_kind_from_string(kind);
  s.input_dim = input_dim;
  s.degree = degree;
  s.a = a;
  s.c = c;
  s.sigma = sigma;
  s.alpha = alpha;
  s.rff_samples = rff_samples;
  s.validate();
  return s;
}

SessionConfig make_session(int shots, const std::string &noise, const std::string &mode, bool obfuscate,
                           std::uint64_t shared_seed, std::uint64_t session_seed, std::uint64_t round, bool adversary,
                           bool per_shot) {
  SessionConfig cfg;
  cfg.shots = shots;
  cfg.noise = NoiseModel::from_level(noise_level_from_string(noise));
  cfg.mode = execution_mode_from_string(mode);
  cfg.obfuscate = obfuscate;
  cfg.shared_seed = shared_seed;
  cfg.session_seed = session_seed;
  cfg.round = round;
  cfg.adversary = adversary;
  cfg.per_shot_execution = per_shot;
  return cfg;
}

py::dict row_to_dict(const ResultRow &r) {
  py::dict d;
  d["cell"] = r.cell;
  d["dataset"] = r.dataset;
  d["method"] = r.method;
  d["mode"] = r.mode;
  d["kernel"] = r.kernel;
  d["convention"] = r.convention;
  d["shots"] = r.shots;
  d["noise"] = r.noise;
  d["folds"] = r.folds;
  d["samples"] = r.samples;
  d["sample_cap"] = r.sample_cap;
  d["mean"] = r.mean;
  d["std"] = r.stddev;
  d["fold_accuracies"] = r.fold_accuracies;
  d["seed"] = r.seed;
  d["digest"] = r.digest;
  d["sessions"] = r.sessions;
  d["status"] = r.status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributed quantum kernel estimation: simulator, protocol and kernel learning";
  m.attr("MAX_QUBITS") = kDefaultMaxQubits;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());
  py::register_exception<EncodingError>(m, "EncodingError", base.ptr());
  py::register_exception<ProtocolViolation>(m, "ProtocolViolation", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<FeatureMapSpec>(m, "FeatureMapSpec")
      .def(py::init(&make_spec), py::arg("kind") = "linear", py::arg("input_dim") = 1, py::arg("degree") = 1,
           py::arg("a") = 1.0, py::arg("c") = 0.0, py::arg("sigma") = 1.0, py::arg("alpha") = 1.0,
           py::arg("rff_samples") = 1)
      .def_property_readonly("kind", [](const FeatureMapSpec &s) { return to_string(s.kind); })
      .def_readonly("input_dim", &FeatureMapSpec::input_dim)
      .def_readonly("degree", &FeatureMapSpec::degree)
      .def_readonly("a", &FeatureMapSpec::a)
      .def_readonly("c", &FeatureMapSpec::c)
      .def_readonly("sigma", &FeatureMapSpec::sigma)
      .def_readonly("alpha", &FeatureMapSpec::alpha)
      .def_readonly("rff_samples", &FeatureMapSpec::rff_samples)
      .def_property_readonly("num_qubits", &FeatureMapSpec::num_qubits)
      .def_property_readonly("encoded_dim", &FeatureMapSpec::encoded_dim);

  m.def(
      "encode",
      [](const std::vector<double> &x, const FeatureMapSpec &spec, std::uint64_t shared_seed) {
        EncodedPoint p;
        if (spec.uses_rff()) {
          const RffDraw draw = sample_rff(spec, shared_seed);
          p = encode(x, spec, &draw);
        } else {
          p = encode(x, spec);
        }
        return py::make_tuple(p.amplitudes, p.norm_factor);
      },
      py::arg("x"), py::arg("spec"), py::arg("shared_seed") = 0,
      "Returns (amplitudes, norm_factor). RFF maps draw their features from shared_seed.");

  m.def(
      "classical_kernel",
      [](const std::vector<double> &x, const std::vector<double> &y, const FeatureMapSpec &spec) {
        return classical_kernel(x, y, spec);
      },
      py::arg("x"), py::arg("y"), py::arg("spec"));

  m.def(
      "run_session",
      [](const std::vector<double> &x, const std::vector<double> &y, const FeatureMapSpec &spec, int shots,
         const std::string &noise, const std::string &mode, bool obfuscate, std::uint64_t shared_seed,
         std::uint64_t session_seed, std::uint64_t round, bool adversary, bool per_shot) {
        const SessionConfig cfg =
            make_session(shots, noise, mode, obfuscate, shared_seed, session_seed, round, adversary, per_shot);
        ProtocolTranscript t;
        {
          py::gil_scoped_release release;
          t = run_session(x, y, spec, cfg);
        }
        py::dict d;
        d["qubits"] = t.qubits;
        d["zeros"] = t.zeros;
        d["estimate"] = t.estimate;
        d["ancilla_probability"] = t.ancilla_probability;
        d["norm_factor_a"] = t.norm_factor_a;
        d["norm_factor_b"] = t.norm_factor_b;
        d["shot_outcomes"] = t.shot_outcomes;
        d["transcript"] = transcript_record(t);
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("spec"), py::arg("shots") = 1024, py::arg("noise") = "none",
      py::arg("mode") = "streaming", py::arg("obfuscate") = true, py::arg("shared_seed") = 0,
      py::arg("session_seed") = 0, py::arg("round") = 0, py::arg("adversary") = false, py::arg("per_shot") = false);

  m.def("intercept_resend_detection_probability", &intercept_resend_detection_probability, py::arg("n"));

  m.def(
      "assemble_gram",
      [](const Eigen::MatrixXd &points, const FeatureMapSpec &spec, const std::string &source,
         const std::string &convention, int shots, const std::string &noise, std::uint64_t seed, int workers,
         int decoy_interval, bool normalize, bool repair) {
        GramOptions opt;
        opt.source = gram_source_from_string(source);
        opt.convention = kernel_convention_from_string(convention);
        opt.session = make_session(shots, noise, "streaming", true, 0, 0, 0, false, false);
        opt.master_seed = seed;
        opt.workers = workers;
        opt.decoy_interval = decoy_interval;
        opt.normalize = normalize;
        GramEstimate g;
        {
          py::gil_scoped_release release;
          g = assemble_gram(points, spec, opt);
          if (repair) g = psd_repair(g);
        }
        py::dict d;
        d["values"] = g.values;
        d["sessions"] = g.sessions;
        d["clipped_mass"] = g.clipped_mass;
        d["repaired"] = g.repair == PsdRepair::Clipped;
        d["decoy_sessions"] = g.decoy_sessions;
        d["decoy_failures"] = g.decoy_failures;
        return d;
      },
      py::arg("points"), py::arg("spec"), py::arg("source") = "classical", py::arg("convention") = "sqrt_fidelity",
      py::arg("shots") = 1024, py::arg("noise") = "none", py::arg("seed") = 0, py::arg("workers") = 1,
      py::arg("decoy_interval") = 0, py::arg("normalize") = false, py::arg("repair") = true,
      "Rows of points are samples. Returns a dict with the Gram matrix under 'values'.");

  m.def(
      "psd_repair",
      [](const Eigen::MatrixXd &k) {
        GramEstimate g;
        g.values = k;
        const GramEstimate r = psd_repair(g);
        return py::make_tuple(r.values, r.clipped_mass);
      },
      py::arg("gram"), "Returns (repaired, clipped_mass).");

  py::class_<SvmModel>(m, "SvmModel")
      .def_readonly("classes", &SvmModel::classes)
      .def_readonly("train_size", &SvmModel::train_size)
      .def_property_readonly("objectives",
                             [](const SvmModel &s) {
                               std::vector<double> out;
                               for (const auto &b : s.machines) out.push_back(b.objective);
                               return out;
                             })
      .def_property_readonly("biases", [](const SvmModel &s) {
        std::vector<double> out;
        for (const auto &b : s.machines) out.push_back(b.bias);
        return out;
      });

  m.def(
      "train_svm",
      [](const Eigen::MatrixXd &gram, const std::vector<int> &labels, double C, double tolerance, int max_passes) {
        return train_svm(gram, labels, SvmParams{C, tolerance, max_passes});
      },
      py::arg("gram"), py::arg("labels"), py::arg("C") = 1.0, py::arg("tolerance") = 1e-3, py::arg("max_passes") = 200);
  m.def("predict_svm", &predict_svm, py::arg("model"), py::arg("cross"),
        "cross holds kernel values between test rows and training columns.");
  m.def("decision_values", &decision_values, py::arg("model"), py::arg("cross"));

  m.def(
      "fit_kpca",
      [](const Eigen::MatrixXd &gram, int k, const Eigen::MatrixXd &cross) {
        const KpcaProjection p = fit_kpca(gram, k);
        return py::make_tuple(p.transform(gram), p.transform(cross), p.eigenvalues);
      },
      py::arg("gram"), py::arg("k"), py::arg("cross"),
      "Returns (train_projection, cross_projection, eigenvalues).");

  m.def(
      "stratified_folds",
      [](const std::vector<int> &labels, int folds, std::uint64_t seed) { return stratified_folds(labels, folds, seed); },
      py::arg("labels"), py::arg("folds") = 5, py::arg("seed") = 0);

  m.def(
      "load_dataset",
      [](const std::string &name, const std::string &data_dir, const std::string &label_column) {
        const Dataset d = load_dataset(name, data_dir, label_column);
        py::dict out;
        out["name"] = d.name;
        out["features"] = d.features;
        out["labels"] = d.labels;
        out["class_names"] = d.class_names;
        out["feature_names"] = d.feature_names;
        out["dropped_rows"] = d.dropped_rows;
        out["warnings"] = d.warnings;
        return out;
      },
      py::arg("name"), py::arg("data_dir") = "data", py::arg("label_column") = "");

  m.def(
      "run_experiment",
      [](const std::string &config_json) {
        const ExperimentConfig cfg = parse_config(config_json);
        ResultRow r;
        {
          py::gil_scoped_release release;
          r = run_experiment(cfg);
        }
        return row_to_dict(r);
      },
      py::arg("config_json"), "Runs one cross-validated experiment described by a JSON config.");

  m.def(
      "validate_config",
      [](const std::string &config_json, int capacity) {
        return validate_config(parse_config(config_json), capacity).to_json();
      },
      py::arg("config_json"), py::arg("capacity") = kDefaultMaxQubits, "Returns the validation report as JSON text.");
}
