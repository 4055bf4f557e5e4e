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
#include <numeric>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rashdx/error.hpp"
#include "rashdx/simclr.hpp"
#include "rashdx/synthetic.hpp"
#include "rashdx/trainer.hpp"

using namespace rashdx;
using namespace rashdx::trainer;

namespace {

// A classifier whose head ignores the features and always favours `label`.
ClassifierModel constant_model(ClassLabel label) {
  ClassifierModel m = make_classifier(nn::encoder_spec("tiny_cnn"), 1);
  m.head.weight(0).setZero();
  m.head.bias(0).setZero();
  m.head.bias(0)(index_of(label), 0) = 3.0f;
  return m;
}

}  // namespace

TEST(Trainer, ArgmaxTakesLowestIndexOnTies) {
  std::vector<double> p{0.1, 0.3, 0.3, 0.1, 0.05, 0.05, 0.05, 0.05};
  auto [label, prob] = argmax_label(p);
  EXPECT_EQ(label, ClassLabel::kChickenpox);
  EXPECT_DOUBLE_EQ(prob, 0.3);
  std::vector<double> wrong(7, 1.0 / 7);
  EXPECT_THROW(argmax_label(wrong), ContractError);
}

TEST(Trainer, PredictIsADistribution) {
  auto m = make_classifier(nn::encoder_spec("tiny_cnn"), 2);
  auto p = predict(m, fixtures::random_image(50, 70, 1));
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
  for (double v : p) EXPECT_GT(v, 0.0);
  EXPECT_EQ(p, predict(m, fixtures::random_image(50, 70, 1)));
}

TEST(Trainer, HandBuiltModelPredictsItsClass) {
  auto m = constant_model(ClassLabel::kMpox);
  auto p = predict(m, fixtures::random_image(32, 32, 3));
  EXPECT_EQ(argmax_label(p).first, ClassLabel::kMpox);
  const double expected = std::exp(3.0) / (std::exp(3.0) + 7.0);
  EXPECT_NEAR(p[index_of(ClassLabel::kMpox)], expected, 1e-6);
}

TEST(Trainer, PredictBytesRejectsGarbage) {
  auto m = constant_model(ClassLabel::kNormal);
  std::vector<std::uint8_t> junk{1, 2, 3, 4};
  EXPECT_THROW(predict_bytes(m, junk), DecodeError);
  auto png = encode_png(quantize8(fixtures::random_image(16, 16, 4)));
  EXPECT_EQ(argmax_label(predict_bytes(m, png)).first, ClassLabel::kNormal);
}

TEST(Trainer, BestEpochIsEarliestMaximum) {
  std::vector<double> acc{0.2, 0.5, 0.4, 0.5};
  EXPECT_EQ(best_epoch_of(acc), 1);
  EXPECT_EQ(best_epoch_of(std::vector<double>{}), -1);
}

TEST(Trainer, ConfigValidation) {
  TrainConfig c;
  c.validate();
  c.epochs = 0;
  EXPECT_THROW(c.validate(), ContractError);
  auto cfg = KeyValueConfig::parse("train.epochs = 7\ntrain.lr = 0.2\n");
  auto parsed = TrainConfig::from_config(cfg);
  EXPECT_EQ(parsed.epochs, 7);
  EXPECT_DOUBLE_EQ(parsed.lr, 0.2);
  EXPECT_EQ(parsed.batch_size, TrainConfig{}.batch_size);
}

TEST(Trainer, CheckpointRoundTrip) {
  fixtures::TempDir dir("ckpt");
  auto m = make_classifier(nn::encoder_spec("small_cnn"), 5);
  m.version = "v-test";
  save_classifier(m, dir / "m.ckpt", {{"note", "x"}});
  auto back = load_classifier(dir / "m.ckpt");
  EXPECT_EQ(back.encoder.params(), m.encoder.params());
  EXPECT_EQ(back.head.params(), m.head.params());
  EXPECT_EQ(back.encoder.spec().name, "small_cnn");
  auto img = fixtures::random_image(40, 40, 6);
  EXPECT_EQ(predict(back, img), predict(m, img));
  EXPECT_THROW(load_classifier(dir / "absent.ckpt"), Error);
}

TEST(Trainer, PretrainedEncoderIsCarriedOver) {
  nn::Encoder enc(nn::encoder_spec("tiny_cnn"), 8);
  auto head = simclr::make_projection_head(64, 9);
  auto ck = simclr::make_checkpoint(enc, head, {}, {1.0}, 0);
  auto m = classifier_from_pretrained(ck, 3);
  EXPECT_EQ(m.encoder.params(), enc.params());
  EXPECT_EQ(m.head.dims().back(), 8);
}

TEST(Trainer, FinetuneLearnsEasyShapes) {
  auto train = synthetic::shapes_dataset(24, {}, 1);
  auto test = synthetic::shapes_dataset(8, {}, 2);
  auto m = make_classifier(nn::encoder_spec("tiny_cnn"), 3);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 16;
  cfg.lr = 0.03;
  fixtures::TempDir dir("ft");
  int calls = 0;
  auto rec = finetune(m, train, test, cfg, dir / "best.ckpt", [&](int, double, double) { ++calls; });
  EXPECT_EQ(calls, 10);
  ASSERT_EQ(rec.test_accuracy.size(), 10u);
  EXPECT_LT(rec.train_loss.back(), rec.train_loss.front());
  EXPECT_GT(rec.best_accuracy(), 0.3);  // chance is 0.125
  EXPECT_EQ(rec.best_epoch, best_epoch_of(rec.test_accuracy));
  // The restored weights are the best epoch's.
  EXPECT_NEAR(accuracy(m, test), rec.best_accuracy(), 1e-12);
  EXPECT_NEAR(accuracy(load_classifier(dir / "best.ckpt"), test), rec.best_accuracy(), 1e-12);
}
