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
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rashdx/error.hpp"
#include "rashdx/simclr.hpp"
#include "rashdx/synthetic.hpp"

using namespace rashdx;
using namespace rashdx::simclr;

TEST(NtXent, MatchesDoubleLoop) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pairs(1, 8), dims(1, 16);
  for (int b = 0; b < 50; ++b) {
    for (double tau : {0.1, 0.5, 1.0}) {
      auto z = oracle::random_batch(rng, pairs(rng), dims(rng));
      EXPECT_NEAR(nt_xent_loss(z, tau), oracle::nt_xent_double_loop(z, tau), 1e-9);
    }
  }
}

TEST(NtXent, SinglePairIsZero) {
  std::mt19937_64 rng(2);
  for (int b = 0; b < 20; ++b) EXPECT_LE(std::abs(nt_xent_loss(oracle::random_batch(rng, 1, 5), 0.5)), 1e-7);
}

TEST(NtXent, ScaleInvariant) {
  std::mt19937_64 rng(3);
  auto z = oracle::random_batch(rng, 6, 10);
  for (double s : {1e-3, 0.5, 7.0, 1e3}) EXPECT_NEAR(nt_xent_loss(s * z, 0.5), nt_xent_loss(z, 0.5), 1e-9);
}

TEST(NtXent, SwappingViewsWithinAPairDoesNotChangeLoss) {
  std::mt19937_64 rng(4);
  auto z = oracle::random_batch(rng, 4, 7);
  auto swapped = z;
  swapped.row(2).swap(swapped.row(3));
  EXPECT_NEAR(nt_xent_loss(swapped, 0.2), nt_xent_loss(z, 0.2), 1e-12);
}

TEST(NtXent, PerfectAlignmentBeatsRandom) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(8, 4);
  for (int k = 0; k < 4; ++k) z(2 * k, k) = z(2 * k + 1, k) = 1.0;
  std::mt19937_64 rng(5);
  EXPECT_LT(nt_xent_loss(z, 0.1), nt_xent_loss(oracle::random_batch(rng, 4, 4), 0.1));
}

TEST(NtXent, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(6);
  for (int b = 0; b < 10; ++b) {
    auto z = oracle::random_batch(rng, 1 + b % 5, 3 + b);
    const double tau = b % 2 ? 0.5 : 0.1;
    auto analytic = nt_xent_loss_and_gradient(z, tau);
    EXPECT_NEAR(analytic.loss, nt_xent_loss(z, tau), 1e-12);
    auto numeric = oracle::central_difference([&](const Eigen::MatrixXd &x) { return nt_xent_loss(x, tau); }, z, 1e-4);
    const double denom = std::max(numeric.norm(), 1e-8);
    EXPECT_LT((analytic.gradient - numeric).norm() / denom, 1e-3) << "batch " << b;
  }
}

TEST(NtXent, Contracts) {
  Eigen::MatrixXd odd = Eigen::MatrixXd::Ones(3, 2);
  EXPECT_THROW(nt_xent_loss(odd, 0.5), ContractError);
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_THROW(nt_xent_loss(zero, 0.5), ContractError);
  EXPECT_THROW(nt_xent_loss(Eigen::MatrixXd::Ones(2, 2), 0.0), ContractError);
  EXPECT_THROW(scaled_cosine_similarity(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3), 1.0), ContractError);
  EXPECT_NEAR(scaled_cosine_similarity(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2), 0.5), 2.0, 1e-12);
}

TEST(Pretrain, ReducesLossAndIsDeterministic) {
  auto data = synthetic::unlabeled_shapes(24, {}, 1);
  PretrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_pairs = 8;
  cfg.seed = 2;
  auto run = [&] {
    nn::Encoder enc(nn::encoder_spec("tiny_cnn"), 1);
    auto head = make_projection_head(64, 2);
    auto curve = pretrain(enc, head, data, cfg);
    return std::make_pair(curve, enc.params());
  };
  auto [curve, params] = run();
  ASSERT_EQ(curve.size(), 3u);
  for (double l : curve) EXPECT_TRUE(std::isfinite(l));
  EXPECT_LT(curve.back(), curve.front());
  auto [curve2, params2] = run();
  EXPECT_EQ(curve, curve2);
  EXPECT_EQ(params, params2);
}

TEST(Pretrain, ConfigValidation) {
  PretrainConfig cfg;
  cfg.validate();
  cfg.tau = 0.0;
  EXPECT_THROW(cfg.validate(), ContractError);
  PretrainConfig small;
  small.batch_pairs = 0;
  EXPECT_THROW(small.validate(), ContractError);
}

TEST(Pretrain, ViewAugmentKeepsStrongColourUnlessOverridden) {
  auto strong = augment::simclr_view_params();
  EXPECT_GT(strong.hue_shift.hi - strong.hue_shift.lo, augment::AugmentParams{}.hue_shift.hi -
                                                           augment::AugmentParams{}.hue_shift.lo);
  auto parsed = PretrainConfig::from_config(KeyValueConfig::parse("augment.saturation_max = 1.5\n"));
  EXPECT_DOUBLE_EQ(parsed.augment.hue_shift.lo, strong.hue_shift.lo);
  EXPECT_DOUBLE_EQ(parsed.augment.saturation.lo, strong.saturation.lo);
  EXPECT_DOUBLE_EQ(parsed.augment.saturation.hi, 1.5);
}
