/**
 * Copyright 2026 The rashdx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "rashdx/cli.hpp"
#include "rashdx/datakit.hpp"
#include "rashdx/error.hpp"
#include "rashdx/evaluator.hpp"
#include "rashdx/service.hpp"
#include "rashdx/simclr.hpp"
#include "rashdx/trainer.hpp"

namespace py = pybind11;
using namespace rashdx;

namespace {

// Round-trips through the json module; the reports are small.
py::object to_python(const nlohmann::json &j) { return py::module_::import("json").attr("loads")(j.dump()); }

evaluator::ConfusionMatrix confusion_from(const std::vector<std::vector<std::uint64_t>> &rows) {
  if (rows.size() != kNumClasses) throw ContractError("confusion matrix must be 8x8");
  evaluator::ConfusionMatrix cm;
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    if (rows[t].size() != kNumClasses) throw ContractError("confusion matrix must be 8x8");
    for (std::size_t p = 0; p < kNumClasses; ++p) cm.counts[t][p] = rows[t][p];
  }
  return cm;
}

py::dict probabilities_dict(const trainer::Probabilities &p) {
  py::dict d;
  for (std::size_t c = 0; c < kNumClasses; ++c) d[py::str(std::string(kClassNames[c]))] = p[c];
  return d;
}

}  // namespace

PYBIND11_MODULE(_rashdx, m) {
  m.doc() = "rashdx core: contrastive pretraining, eight-class rash classification and triage";
  m.attr("__version__") = cli::kVersion;
  m.attr("DEFAULT_THRESHOLD") = service::kDefaultThreshold;
  py::list names;
  for (auto n : kClassNames) names.append(std::string(n));
  m.attr("CLASS_NAMES") = py::tuple(names);

  // Leaked on purpose: the type must outlive interpreter finalization.
  static py::handle error = py::exception<Error>(m, "Error", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      PyErr_SetString(error.ptr(), (e.kind() + ": " + e.what()).c_str());
    }
  });

  m.def("nt_xent_loss", &simclr::nt_xent_loss, py::arg("batch"), py::arg("tau") = 0.5,
        "NT-Xent over a 2N x d batch whose rows 2k and 2k+1 are positive pairs.");
  m.def(
      "nt_xent_loss_and_gradient",
      [](const Eigen::MatrixXd &batch, double tau) {
        auto r = simclr::nt_xent_loss_and_gradient(batch, tau);
        return py::make_tuple(r.loss, r.gradient);
      },
      py::arg("batch"), py::arg("tau") = 0.5);

  m.def(
      "metrics_report",
      [](const std::vector<std::vector<std::uint64_t>> &rows) {
        return to_python(evaluator::to_json(evaluator::metrics_report(confusion_from(rows))));
      },
      py::arg("confusion"), "Per-class metrics of an 8x8 counts[truth][prediction] matrix.");
  m.def("f1_score", &evaluator::f1_score, py::arg("precision"), py::arg("recall"));
  m.def(
      "threshold_report",
      [](const std::vector<double> &probabilities, const std::vector<bool> &correct, double threshold) {
        auto flags = std::make_unique<bool[]>(correct.size());
        std::copy(correct.begin(), correct.end(), flags.get());
        return to_python(evaluator::to_json(
            evaluator::threshold_report(probabilities, std::span<const bool>(flags.get(), correct.size()), threshold)));
      },
      py::arg("probabilities"), py::arg("correct"), py::arg("threshold") = service::kDefaultThreshold);

  m.def(
      "class_distribution",
      [](const std::filesystem::path &manifest) {
        auto counts = datakit::class_distribution(datakit::load_manifest(manifest));
        py::dict d;
        for (std::size_t c = 0; c < kNumClasses; ++c) d[py::str(std::string(kClassNames[c]))] = counts[c];
        return d;
      },
      py::arg("manifest"));
  m.def(
      "split_manifest",
      [](const std::filesystem::path &manifest, double train_fraction, std::uint64_t seed,
         const std::filesystem::path &out_dir) {
        auto split = datakit::stratified_split(datakit::load_manifest(manifest), train_fraction, seed);
        auto train = out_dir / (split.train.name() + ".csv");
        auto test = out_dir / (split.test.name() + ".csv");
        datakit::save_manifest(split.train, train);
        datakit::save_manifest(split.test, test);
        return py::make_tuple(train, test);
      },
      py::arg("manifest"), py::arg("train_fraction") = 0.8, py::arg("seed") = 0, py::arg("out_dir"),
      "Writes <name>_train.csv and <name>_test.csv; returns their paths.");

  py::class_<trainer::ClassifierModel>(m, "Classifier")
      .def_static(
          "load", [](const std::filesystem::path &p) { return trainer::load_classifier(p); }, py::arg("path"))
      .def_static(
          "untrained",
          [](const std::string &encoder, std::uint64_t seed) {
            return trainer::make_classifier(nn::encoder_spec(encoder), seed);
          },
          py::arg("encoder") = "tiny_cnn", py::arg("seed") = 0)
      .def_readonly("version", &trainer::ClassifierModel::version)
      .def_property_readonly("encoder", [](const trainer::ClassifierModel &c) { return c.encoder.spec().name; })
      .def(
          "predict",
          [](const trainer::ClassifierModel &c, const py::bytes &payload) {
            std::string s = payload;
            std::vector<std::uint8_t> bytes(s.begin(), s.end());
            trainer::Probabilities p;
            {
              py::gil_scoped_release release;
              p = trainer::predict_bytes(c, bytes);
            }
            return probabilities_dict(p);
          },
          py::arg("image_bytes"), "Class probabilities for PNG/JPEG bytes.")
      .def(
          "diagnose",
          [](const trainer::ClassifierModel &c, const py::bytes &payload, double threshold) {
            std::string s = payload;
            std::vector<std::uint8_t> bytes(s.begin(), s.end());
            auto result = service::triage(trainer::predict_bytes(c, bytes), threshold, c.version);
            return to_python(service::to_json(result));
          },
          py::arg("image_bytes"), py::arg("threshold") = service::kDefaultThreshold);

  m.def(
      "run_cli",
      [](const std::vector<std::string> &args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a rashdx subcommand in-process; returns (exit_code, stdout, stderr).");
}
