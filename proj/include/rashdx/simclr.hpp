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
#ifndef RASHDX_SIMCLR_HPP_
#define RASHDX_SIMCLR_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rashdx/augment.hpp"
#include "rashdx/checkpoint.hpp"
#include "rashdx/nn.hpp"
#include "rashdx/source.hpp"

namespace rashdx::simclr {

/// 2N x d projections; rows 2k and 2k+1 (0-based) are the two views of
/// source image k.
using EmbeddingBatch = Eigen::MatrixXd;

/// z_i . z_j / (tau |z_i| |z_j|). ContractError on zero vectors, tau <= 0
/// or a dimension mismatch.
double scaled_cosine_similarity(const Eigen::VectorXd &z_i, const Eigen::VectorXd &z_j, double tau);

/// Mean over all 2N anchors of -log(exp(s_{i,p(i)}) / sum_{k != i} exp(s_{i,k}))
/// where p(i) is the other view of i's source. Exactly zero for N = 1.
double nt_xent_loss(const EmbeddingBatch &batch, double tau);

struct NtXentResult {
  double loss = 0.0;
  EmbeddingBatch gradient;  // dLoss/dbatch, same shape as the batch
};

NtXentResult nt_xent_loss_and_gradient(const EmbeddingBatch &batch, double tau);

/// feature_dim -> hidden -> out with one ReLU.
nn::Mlp make_projection_head(int feature_dim, int hidden_dim, int output_dim, std::uint64_t seed);
inline nn::Mlp make_projection_head(int feature_dim, std::uint64_t seed) {
  return make_projection_head(feature_dim, feature_dim, 128, seed);
}

struct PretrainConfig {
  int epochs = 100;
  int batch_pairs = 64;  // N: source images per step, 2N views
  double tau = 0.5;
  double lr = 0.05;
  double momentum = 0.9;
  double weight_decay = 0.0;
  bool cosine_decay = true;
  std::uint64_t seed = 0;
  augment::AugmentParams augment = augment::simclr_view_params();

  void validate() const;
  static PretrainConfig from_config(const KeyValueConfig &config);
  nlohmann::json to_json() const;
};

/// Called after every epoch with (epoch, mean loss).
using EpochCallback = std::function<void(int, double)>;

/// Contrastive pretraining of `encoder` and `head` over the unlabeled
/// corpus. The order of source images and every augmentation draw are
/// fixed by config.seed. A trailing batch of fewer than two images is
/// dropped (it carries no negatives). Returns the per-epoch mean loss.
/// Throws TrainingDivergedError (naming the epoch) on a non-finite loss.
std::vector<double> pretrain(nn::Encoder &encoder, nn::Mlp &head, const ImageSource &data,
                             const PretrainConfig &config, const EpochCallback &on_epoch = {});

/// Bundles the pretrained weights, config echo and loss curve.
Checkpoint make_checkpoint(const nn::Encoder &encoder, const nn::Mlp &head, const PretrainConfig &config,
                           const std::vector<double> &loss_curve, std::uint64_t corpus_fingerprint);

}  // namespace rashdx::simclr

#endif  // RASHDX_SIMCLR_HPP_
