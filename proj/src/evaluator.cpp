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
#include "rashdx/evaluator.hpp"

#include <sstream>

#include "rashdx/error.hpp"
#include "rashdx/source.hpp"

namespace rashdx::evaluator {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (const auto &row : counts)
    for (auto v : row) s += v;
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) s += counts[i][i];
  return s;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::uint64_t s = 0;
  for (auto v : counts.at(truth)) s += v;
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t prediction) const {
  std::uint64_t s = 0;
  for (const auto &row : counts) s += row.at(prediction);
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const ClassLabel> predictions, std::span<const ClassLabel> truths) {
  require(predictions.size() == truths.size(), "predictions and truths differ in length");
  require(!truths.empty(), "confusion matrix over an empty sequence");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truths.size(); ++i) ++cm.at(truths[i], predictions[i]);
  return cm;
}

namespace {

Metric ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json metric_json(const Metric &m) { return m ? nlohmann::json(*m) : nlohmann::json(nullptr); }

}  // namespace

Metric f1_score(Metric precision, Metric recall) {
  if (!precision || !recall) return std::nullopt;
  const double s = *precision + *recall;
  if (s == 0.0) return std::nullopt;
  return 2.0 * *precision * *recall / s;
}

MetricsReport metrics_report(const ConfusionMatrix &cm) {
  const std::uint64_t total = cm.total();
  require(total > 0, "metrics of an empty confusion matrix");
  MetricsReport r;
  r.confusion = cm;
  r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    ClassMetrics &m = r.per_class[c];
    m.tp = cm.counts[c][c];
    m.fn = cm.row_sum(c) - m.tp;
    m.fp = cm.col_sum(c) - m.tp;
    m.tn = total - m.tp - m.fn - m.fp;
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.recall = ratio(m.tp, m.tp + m.fn);
    m.specificity = ratio(m.tn, m.tn + m.fp);
    m.f1 = f1_score(m.precision, m.recall);
  }
  return r;
}

std::vector<SubsetReport> subset_assessment(const datakit::DatasetManifest &manifest,
                                            std::span<const ClassLabel> predictions, PartitionKey key) {
  require(predictions.size() == manifest.size(), "one prediction per manifest record");
  constexpr std::size_t kSlots = 4;
  std::array<std::size_t, kSlots> count{}, hit{};
  std::size_t tagged = 0;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto &r = manifest.records()[i];
    if (r.label != ClassLabel::kMpox) continue;
    std::size_t slot;
    if (key == PartitionKey::kGrade) {
      if (!r.grade) continue;
      slot = static_cast<std::size_t>(*r.grade);
    } else {
      if (!r.stage) continue;
      slot = static_cast<std::size_t>(*r.stage);
    }
    ++tagged;
    ++count[slot];
    if (predictions[i] == ClassLabel::kMpox) ++hit[slot];
  }
  require(tagged > 0, std::string("no Mpox records tagged with a ") +
                          (key == PartitionKey::kGrade ? "grade" : "stage"));
  std::vector<SubsetReport> out;
  const std::size_t slots = key == PartitionKey::kGrade ? 4 : 2;
  for (std::size_t s = 0; s < slots; ++s) {
    if (count[s] == 0) continue;
    SubsetReport rep;
    rep.partition = key == PartitionKey::kGrade ? std::string(name_of(static_cast<Grade>(s)))
                                                : std::string(name_of(static_cast<Stage>(s)));
    rep.count = count[s];
    rep.predicted_mpox = hit[s];
    rep.recall = static_cast<double>(hit[s]) / static_cast<double>(count[s]);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<SubsetReport> subset_assessment(const trainer::ClassifierModel &model,
                                            const datakit::DatasetManifest &manifest, PartitionKey key) {
  std::vector<ClassLabel> predictions(manifest.size(), ClassLabel::kBullous);
  bool any = false;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto &r = manifest.records()[i];
    const bool tagged = r.label == ClassLabel::kMpox && (key == PartitionKey::kGrade ? r.grade.has_value()
                                                                                      : r.stage.has_value());
    if (!tagged) continue;
    any = true;
    auto p = trainer::predict(model, read_image(manifest.resolve(r)));
    predictions[i] = trainer::argmax_label(p).first;
  }
  require(any, std::string("no Mpox records tagged with a ") + (key == PartitionKey::kGrade ? "grade" : "stage"));
  return subset_assessment(manifest, predictions, key);
}

ThresholdReport threshold_report(std::span<const double> top_probabilities, std::span<const bool> correct_flags,
                                 double threshold) {
  require(top_probabilities.size() == correct_flags.size(), "probabilities and flags differ in length");
  ThresholdReport r;
  r.threshold = threshold;
  r.total = top_probabilities.size();
  std::size_t above_ok = 0, below = 0, below_ok = 0;
  for (std::size_t i = 0; i < r.total; ++i) {
    const double p = top_probabilities[i];
    require(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
    if (p >= threshold) {
      ++r.at_or_above;
      if (correct_flags[i]) ++above_ok;
    } else {
      ++below;
      if (correct_flags[i]) ++below_ok;
    }
  }
  r.coverage = r.total ? static_cast<double>(r.at_or_above) / static_cast<double>(r.total) : 0.0;
  r.accuracy_at_or_above = ratio(above_ok, r.at_or_above);
  r.accuracy_below = ratio(below_ok, below);
  return r;
}

Evaluation evaluate(const trainer::ClassifierModel &model, const ImageSource &data) {
  require(data.size() > 0, "evaluation over an empty set");
  Evaluation ev;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto label = data.label(i);
    require(label.has_value(), "evaluation needs labeled data");
    auto p = trainer::predict(model, data.image(i));
    ev.truths.push_back(*label);
    ev.predictions.push_back(trainer::argmax_label(p).first);
    ev.probabilities.push_back(p);
  }
  return ev;
}

nlohmann::json to_json(const ConfusionMatrix &cm) {
  auto rows = nlohmann::json::array();
  for (const auto &row : cm.counts) rows.push_back(row);
  return rows;
}

nlohmann::json to_json(const MetricsReport &report) {
  nlohmann::json per_class = nlohmann::json::object();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto &m = report.per_class[c];
    per_class[std::string(kClassNames[c])] = {{"precision", metric_json(m.precision)},
                                              {"recall", metric_json(m.recall)},
                                              {"specificity", metric_json(m.specificity)},
                                              {"f1", metric_json(m.f1)},
                                              {"support", m.tp + m.fn}};
  }
  return {{"accuracy", report.accuracy},
          {"total", report.confusion.total()},
          {"classes", kClassNames},
          {"per_class", per_class},
          {"confusion_matrix", to_json(report.confusion)}};
}

nlohmann::json to_json(const std::vector<SubsetReport> &reports) {
  auto arr = nlohmann::json::array();
  for (const auto &r : reports) {
    arr.push_back({{"partition", r.partition}, {"count", r.count}, {"predicted_mpox", r.predicted_mpox},
                   {"recall", r.recall}});
  }
  return arr;
}

nlohmann::json to_json(const ThresholdReport &r) {
  return {{"threshold", r.threshold},
          {"total", r.total},
          {"at_or_above", r.at_or_above},
          {"coverage", r.coverage},
          {"accuracy_at_or_above", metric_json(r.accuracy_at_or_above)},
          {"accuracy_below", metric_json(r.accuracy_below)}};
}

std::string metrics_csv(const MetricsReport &report) {
  std::ostringstream out;
  out.precision(10);
  auto cell = [&](const Metric &m) {
    if (m) out << *m;
  };
  out << "class,precision,recall,specificity,f1,support\n";
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto &m = report.per_class[c];
    out << kClassNames[c] << ',';
    cell(m.precision);
    out << ',';
    cell(m.recall);
    out << ',';
    cell(m.specificity);
    out << ',';
    cell(m.f1);
    out << ',' << (m.tp + m.fn) << '\n';
  }
  return out.str();
}

}  // namespace rashdx::evaluator
