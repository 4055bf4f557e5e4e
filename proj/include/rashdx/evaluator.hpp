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
#ifndef RASHDX_EVALUATOR_HPP_
#define RASHDX_EVALUATOR_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rashdx/datakit.hpp"
#include "rashdx/labels.hpp"
#include "rashdx/trainer.hpp"

namespace rashdx::evaluator {

/// counts[truth][prediction].
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t truth) const;
  std::uint64_t col_sum(std::size_t prediction) const;
  std::uint64_t &at(ClassLabel truth, ClassLabel prediction) {
    return counts[static_cast<std::size_t>(index_of(truth))][static_cast<std::size_t>(index_of(prediction))];
  }
  std::uint64_t at(ClassLabel truth, ClassLabel prediction) const {
    return counts[static_cast<std::size_t>(index_of(truth))][static_cast<std::size_t>(index_of(prediction))];
  }
  friend bool operator==(const ConfusionMatrix &, const ConfusionMatrix &) = default;
};

/// A ratio whose denominator may be zero; nullopt means undefined and
/// serializes as JSON null.
using Metric = std::optional<double>;

struct ClassMetrics {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  Metric precision, recall, specificity, f1;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::array<ClassMetrics, kNumClasses> per_class{};
  ConfusionMatrix confusion;
};

ConfusionMatrix confusion_matrix(std::span<const ClassLabel> predictions, std::span<const ClassLabel> truths);

/// One-vs-rest readout per class: precision TP/(TP+FP), recall TP/(TP+FN),
/// specificity TN/(TN+FP), F1 the harmonic mean of precision and recall;
/// accuracy trace/total. Zero denominators give undefined metrics.
MetricsReport metrics_report(const ConfusionMatrix &cm);

/// The F1 of a (precision, recall) pair; undefined if either is undefined
/// or both are zero.
Metric f1_score(Metric precision, Metric recall);

enum class PartitionKey { kGrade, kStage };

struct SubsetReport {
  std::string partition;  // "I", "II", "III", "Others", "earlier" or "later"
  std::size_t count = 0;
  std::size_t predicted_mpox = 0;
  double recall = 0.0;
};

/// Mpox recall per partition value over the tagged Mpox records; a record
/// counts as recalled iff its 8-way prediction is Mpox. Partitions are
/// reported in grade/stage order, only when present. ContractError when no
/// record carries the key.
std::vector<SubsetReport> subset_assessment(const datakit::DatasetManifest &manifest,
                                            std::span<const ClassLabel> predictions, PartitionKey key);

/// Runs `model` over the manifest's tagged Mpox records first.
std::vector<SubsetReport> subset_assessment(const trainer::ClassifierModel &model,
                                            const datakit::DatasetManifest &manifest, PartitionKey key);

struct ThresholdReport {
  double threshold = 0.6;
  std::size_t total = 0;
  std::size_t at_or_above = 0;
  double coverage = 0.0;
  Metric accuracy_at_or_above;
  Metric accuracy_below;
};

ThresholdReport threshold_report(std::span<const double> top_probabilities, std::span<const bool> correct_flags,
                                 double threshold);

/// Predictions of `model` over a labeled manifest.
struct Evaluation {
  std::vector<ClassLabel> truths;
  std::vector<ClassLabel> predictions;
  std::vector<trainer::Probabilities> probabilities;
};
Evaluation evaluate(const trainer::ClassifierModel &model, const ImageSource &data);

nlohmann::json to_json(const ConfusionMatrix &cm);
nlohmann::json to_json(const MetricsReport &report);
nlohmann::json to_json(const std::vector<SubsetReport> &reports);
nlohmann::json to_json(const ThresholdReport &report);

/// Per-class rows: class,precision,recall,specificity,f1,support.
std::string metrics_csv(const MetricsReport &report);

}  // namespace rashdx::evaluator

#endif  // RASHDX_EVALUATOR_HPP_
