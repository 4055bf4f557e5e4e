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
#ifndef RASHDX_TRAINER_HPP_
#define RASHDX_TRAINER_HPP_

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rashdx/checkpoint.hpp"
#include "rashdx/labels.hpp"
#include "rashdx/nn.hpp"
#include "rashdx/source.hpp"
#include "rashdx/util.hpp"

namespace rashdx::trainer {

using Probabilities = std::array<double, kNumClasses>;

/// Encoder plus a linear feature_dim -> 8 classification head. Inputs are
/// resized to 224x224 before the encoder (see rashdx::preprocess).
struct ClassifierModel {
  nn::Encoder encoder;
  nn::Mlp head;
  std::string version = "untrained";
};

ClassifierModel make_classifier(const nn::EncoderSpec &spec, std::uint64_t seed);

/// Takes the encoder of a SimCLR checkpoint (the projection head is
/// dropped) and attaches a freshly initialised classification head.
ClassifierModel classifier_from_pretrained(const Checkpoint &simclr, std::uint64_t seed);

/// The 8 raw class scores for an image of any size.
nn::Vector scores(const ClassifierModel &model, const ImageTensor &image);

/// Normalized exponentials of the class scores.
Probabilities predict(const ClassifierModel &model, const ImageTensor &image);

/// Decodes PNG/JPEG bytes first; DecodeError on corrupt payloads.
Probabilities predict_bytes(const ClassifierModel &model, std::span<const std::uint8_t> bytes);

/// Index of the maximum entry (lowest index on ties) and its value.
std::pair<ClassLabel, double> argmax_label(std::span<const double> probabilities);

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  static TrainConfig from_config(const KeyValueConfig &config);
  nlohmann::json to_json() const;
};

struct TrainingRecord {
  std::vector<double> train_loss;     // mean cross-entropy per epoch
  std::vector<double> test_accuracy;  // after each epoch
  int best_epoch = -1;                // first epoch attaining the max accuracy
  std::string best_checkpoint;        // empty when no checkpoint path was given

  double best_accuracy() const;
};

/// Index of the maximum, earliest on ties; -1 for an empty sequence.
int best_epoch_of(std::span<const double> accuracy);

using TrainCallback = std::function<void(int epoch, double loss, double accuracy)>;

/// Full fine-tuning (encoder and head) with cross-entropy and momentum SGD.
/// Test accuracy is measured after every epoch; the best-scoring weights
/// are saved to `checkpoint_path` (when non-empty) and restored into `model`
/// when training ends. Throws TrainingDivergedError on a non-finite loss.
TrainingRecord finetune(ClassifierModel &model, const ImageSource &train_set, const ImageSource &test_set,
                        const TrainConfig &config, const std::filesystem::path &checkpoint_path = {},
                        const TrainCallback &on_epoch = {});

/// Fraction of labeled images whose argmax prediction matches the label.
double accuracy(const ClassifierModel &model, const ImageSource &data);

/// (epoch, train_loss, test_accuracy) CSV.
void write_curve_csv(const TrainingRecord &record, const std::filesystem::path &path);

Checkpoint make_checkpoint(const ClassifierModel &model, const nlohmann::json &metadata = nlohmann::json::object());
ClassifierModel classifier_from_checkpoint(const Checkpoint &checkpoint);
void save_classifier(const ClassifierModel &model, const std::filesystem::path &path,
                     const nlohmann::json &metadata = nlohmann::json::object());
ClassifierModel load_classifier(const std::filesystem::path &path);

}  // namespace rashdx::trainer

#endif  // RASHDX_TRAINER_HPP_
