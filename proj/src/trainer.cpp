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
#include "rashdx/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "rashdx/error.hpp"

namespace rashdx::trainer {

namespace {

std::string weights_digest(const ClassifierModel &model) {
  std::uint64_t h = kFnvOffset;
  for (const nn::ParamStore *store : {&model.encoder.params(), &model.head.params()}) {
    for (const auto &m : store->values) {
      h = fnv1a(std::string_view(reinterpret_cast<const char *>(m.data()), m.size() * sizeof(float)), h);
    }
  }
  return hex64(h).substr(0, 12);
}

}  // namespace

ClassifierModel make_classifier(const nn::EncoderSpec &spec, std::uint64_t seed) {
  ClassifierModel m;
  m.encoder = nn::Encoder(spec, seed);
  m.head = nn::Mlp({spec.feature_dim, static_cast<int>(kNumClasses)}, mix_seed(seed, 0xC1));
  return m;
}

ClassifierModel classifier_from_pretrained(const Checkpoint &simclr, std::uint64_t seed) {
  require(simclr.stores.count("encoder") != 0, "checkpoint carries no encoder weights");
  ClassifierModel m = make_classifier(simclr.encoder, seed);
  assign_params(m.encoder.params(), simclr.stores.at("encoder"), "encoder");
  m.version = "pretrained";
  return m;
}

nn::Vector scores(const ClassifierModel &model, const ImageTensor &image) {
  ImageTensor x = preprocess(image);
  return model.head.forward(model.encoder.forward(x, nullptr), nullptr);
}

Probabilities predict(const ClassifierModel &model, const ImageTensor &image) {
  auto p = nn::softmax(scores(model, image));
  require(p.size() == kNumClasses, "classifier head must produce 8 scores");
  Probabilities out{};
  std::copy(p.begin(), p.end(), out.begin());
  return out;
}

Probabilities predict_bytes(const ClassifierModel &model, std::span<const std::uint8_t> bytes) {
  return predict(model, decode_image(bytes));
}

std::pair<ClassLabel, double> argmax_label(std::span<const double> probabilities) {
  require(probabilities.size() == kNumClasses,
          "expected 8 probabilities, got " + std::to_string(probabilities.size()));
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumClasses; ++i)
    if (probabilities[i] > probabilities[best]) best = i;
  return {kAllClasses[best], probabilities[best]};
}

void TrainConfig::validate() const {
  require(epochs >= 1, "fine-tuning needs at least one epoch");
  require(batch_size >= 1, "batch_size must be positive");
  require(lr > 0.0, "learning rate must be positive");
  require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
  require(weight_decay >= 0.0, "weight decay must be non-negative");
}

TrainConfig TrainConfig::from_config(const KeyValueConfig &config) {
  TrainConfig c;
  c.epochs = static_cast<int>(config.get_int("train.epochs", c.epochs));
  c.batch_size = static_cast<int>(config.get_int("train.batch_size", c.batch_size));
  c.lr = config.get_double("train.lr", c.lr);
  c.momentum = config.get_double("train.momentum", c.momentum);
  c.weight_decay = config.get_double("train.weight_decay", c.weight_decay);
  c.seed = static_cast<std::uint64_t>(config.get_int("train.seed", static_cast<long long>(c.seed)));
  return c;
}

nlohmann::json TrainConfig::to_json() const {
  return {{"epochs", epochs},     {"batch_size", batch_size},     {"lr", lr},
          {"momentum", momentum}, {"weight_decay", weight_decay}, {"seed", seed},
          {"loss", "cross_entropy"}, {"optimizer", "sgd"}};
}

double TrainingRecord::best_accuracy() const {
  return best_epoch >= 0 ? test_accuracy[static_cast<std::size_t>(best_epoch)] : 0.0;
}

int best_epoch_of(std::span<const double> accuracy) {
  int best = -1;
  for (std::size_t i = 0; i < accuracy.size(); ++i)
    if (best < 0 || accuracy[i] > accuracy[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

double accuracy(const ClassifierModel &model, const ImageSource &data) {
  require(data.size() > 0, "accuracy over an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto label = data.label(i);
    require(label.has_value(), "accuracy needs labeled data");
    auto p = predict(model, data.image(i));
    if (argmax_label(p).first == *label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainingRecord finetune(ClassifierModel &model, const ImageSource &train_set, const ImageSource &test_set,
                        const TrainConfig &config, const std::filesystem::path &checkpoint_path,
                        const TrainCallback &on_epoch) {
  config.validate();
  require(train_set.size() > 0, "training set is empty");
  require(test_set.size() > 0, "test set is empty");
  for (std::size_t i = 0; i < train_set.size(); ++i) require(train_set.label(i).has_value(), "unlabeled training image");

  const std::size_t n = train_set.size();
  const auto batch = static_cast<std::size_t>(config.batch_size);
  nn::Sgd sgd({&model.encoder.params(), &model.head.params()}, {config.momentum, config.weight_decay});
  TrainingRecord record;
  std::vector<std::size_t> order(n);
  nn::ParamStore best_encoder = model.encoder.params(), best_head = model.head.params();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix_seed(config.seed, 0xF17E, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t count = std::min(batch, n - start);
      nn::Gradients enc_grads = nn::zeros_like(model.encoder.params());
      nn::Gradients head_grads = nn::zeros_like(model.head.params());
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t idx = order[start + k];
        nn::EncoderTrace enc_trace;
        nn::MlpTrace head_trace;
        ImageTensor x = preprocess(train_set.image(idx));
        nn::Vector h = model.encoder.forward(x, &enc_trace);
        nn::Vector logits = model.head.forward(h, &head_trace);
        auto p = nn::softmax(logits);
        const auto y = static_cast<std::size_t>(index_of(*train_set.label(idx)));
        const double loss = -std::log(std::max(p[y], 1e-300));
        if (!std::isfinite(loss) || !logits.allFinite()) {
          throw TrainingDivergedError("non-finite cross-entropy in epoch " + std::to_string(epoch), epoch);
        }
        loss_sum += loss;
        nn::Vector d_logits(static_cast<Eigen::Index>(kNumClasses));
        for (std::size_t c = 0; c < kNumClasses; ++c) {
          d_logits[static_cast<Eigen::Index>(c)] = static_cast<float>(p[c] - (c == y ? 1.0 : 0.0));
        }
        nn::Vector dh = model.head.backward(head_trace, d_logits, head_grads);
        model.encoder.backward(enc_trace, dh, enc_grads);
      }
      const float inv = 1.0f / static_cast<float>(count);
      nn::scale(enc_grads, inv);
      nn::scale(head_grads, inv);
      sgd.step({&enc_grads, &head_grads}, config.lr);
    }
    const double mean_loss = loss_sum / static_cast<double>(n);
    if (!std::isfinite(mean_loss)) {
      throw TrainingDivergedError("non-finite cross-entropy in epoch " + std::to_string(epoch), epoch);
    }
    const double acc = accuracy(model, test_set);
    record.train_loss.push_back(mean_loss);
    record.test_accuracy.push_back(acc);
    if (record.best_epoch < 0 || acc > record.test_accuracy[static_cast<std::size_t>(record.best_epoch)]) {
      record.best_epoch = epoch;
      best_encoder = model.encoder.params();
      best_head = model.head.params();
      if (!checkpoint_path.empty()) {
        model.version = model.encoder.spec().name + "-" + weights_digest(model);
        save_classifier(model, checkpoint_path,
                        {{"train_config", config.to_json()}, {"best_epoch", epoch}, {"test_accuracy", acc}});
        record.best_checkpoint = checkpoint_path.string();
      }
    }
    if (on_epoch) on_epoch(epoch, mean_loss, acc);
  }
  model.encoder.params() = best_encoder;
  model.head.params() = best_head;
  model.version = model.encoder.spec().name + "-" + weights_digest(model);
  return record;
}

void write_curve_csv(const TrainingRecord &record, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(10);
  out << "epoch,train_loss,test_accuracy\n";
  for (std::size_t i = 0; i < record.train_loss.size(); ++i) {
    out << i << ',' << record.train_loss[i] << ',' << record.test_accuracy[i] << '\n';
  }
}

Checkpoint make_checkpoint(const ClassifierModel &model, const nlohmann::json &metadata) {
  Checkpoint ck;
  ck.kind = "classifier";
  ck.encoder = model.encoder.spec();
  ck.stores["encoder"] = model.encoder.params();
  ck.stores["classifier"] = model.head.params();
  ck.mlp_dims["classifier"] = model.head.dims();
  ck.metadata = metadata.is_object() ? metadata : nlohmann::json::object();
  ck.metadata["model_version"] = model.version == "untrained" || model.version == "pretrained"
                                     ? model.encoder.spec().name + "-" + weights_digest(model)
                                     : model.version;
  return ck;
}

ClassifierModel classifier_from_checkpoint(const Checkpoint &checkpoint) {
  if (checkpoint.kind != "classifier" || checkpoint.stores.count("classifier") == 0) {
    throw ValidationError("checkpoint of kind '" + checkpoint.kind + "' holds no classification head");
  }
  ClassifierModel m = make_classifier(checkpoint.encoder, 0);
  assign_params(m.encoder.params(), checkpoint.stores.at("encoder"), "encoder");
  auto dims = checkpoint.mlp_dims.at("classifier");
  m.head = nn::Mlp(dims, 0);
  assign_params(m.head.params(), checkpoint.stores.at("classifier"), "classifier");
  m.version = checkpoint.metadata.value("model_version", m.encoder.spec().name + "-" + weights_digest(m));
  return m;
}

void save_classifier(const ClassifierModel &model, const std::filesystem::path &path, const nlohmann::json &metadata) {
  save_checkpoint(make_checkpoint(model, metadata), path);
}

ClassifierModel load_classifier(const std::filesystem::path &path) {
  return classifier_from_checkpoint(load_checkpoint(path));
}

}  // namespace rashdx::trainer
