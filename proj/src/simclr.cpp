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
#include "rashdx/simclr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rashdx/error.hpp"

namespace rashdx::simclr {

double scaled_cosine_similarity(const Eigen::VectorXd &z_i, const Eigen::VectorXd &z_j, double tau) {
  require(tau > 0.0, "temperature must be positive");
  require(z_i.size() == z_j.size(), "similarity of vectors with different dimensions");
  const double ni = z_i.norm(), nj = z_j.norm();
  require(ni > 0.0 && nj > 0.0, "cosine similarity of a zero-norm vector");
  return z_i.dot(z_j) / (tau * ni * nj);
}

namespace {

void check_batch(const EmbeddingBatch &batch, double tau) {
  require(tau > 0.0, "temperature must be positive");
  require(batch.rows() >= 2 && batch.rows() % 2 == 0, "embedding batch needs 2N rows with N >= 1");
  require(batch.cols() >= 1, "embedding batch has zero-dimensional rows");
  require(batch.allFinite(), "embedding batch contains non-finite values");
}

}  // namespace

NtXentResult nt_xent_loss_and_gradient(const EmbeddingBatch &batch, double tau) {
  check_batch(batch, tau);
  const Eigen::Index m = batch.rows();
  Eigen::VectorXd norms = batch.rowwise().norm();
  require((norms.array() > 0.0).all(), "embedding batch contains a zero-norm row");
  EmbeddingBatch unit = norms.cwiseInverse().asDiagonal() * batch;
  Eigen::MatrixXd sim = unit * unit.transpose() / tau;

  // weights(i, k) = dLoss/dsim(i, k)
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(m, m);
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index pos = i ^ 1;
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != i) mx = std::max(mx, sim(i, k));
    double sum = 0.0;
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != i) sum += std::exp(sim(i, k) - mx);
    const double lse = mx + std::log(sum);
    total += lse - sim(i, pos);
    for (Eigen::Index k = 0; k < m; ++k)
      if (k != i) weights(i, k) = std::exp(sim(i, k) - lse);
    weights(i, pos) -= 1.0;
  }
  const auto inv_m = 1.0 / static_cast<double>(m);
  NtXentResult out;
  out.loss = total * inv_m;
  weights *= inv_m;

  // sim = U U^T / tau, so dU = (W + W^T) U / tau; then through z / |z|.
  Eigen::MatrixXd d_unit = (weights + weights.transpose()) * unit / tau;
  out.gradient.resize(m, batch.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    const double radial = unit.row(i).dot(d_unit.row(i));
    out.gradient.row(i) = (d_unit.row(i) - radial * unit.row(i)) / norms(i);
  }
  return out;
}

double nt_xent_loss(const EmbeddingBatch &batch, double tau) { return nt_xent_loss_and_gradient(batch, tau).loss; }

nn::Mlp make_projection_head(int feature_dim, int hidden_dim, int output_dim, std::uint64_t seed) {
  return nn::Mlp({feature_dim, hidden_dim, output_dim}, seed);
}

void PretrainConfig::validate() const {
  require(epochs >= 0, "epochs must be non-negative");
  require(batch_pairs >= 1, "batch_pairs must be at least 1");
  require(tau > 0.0, "temperature must be positive");
  require(lr > 0.0, "learning rate must be positive");
  require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
  require(weight_decay >= 0.0, "weight decay must be non-negative");
  augment.validate();
}

PretrainConfig PretrainConfig::from_config(const KeyValueConfig &config) {
  PretrainConfig c;
  c.epochs = static_cast<int>(config.get_int("pretrain.epochs", c.epochs));
  c.batch_pairs = static_cast<int>(config.get_int("pretrain.batch_pairs", c.batch_pairs));
  c.tau = config.get_double("pretrain.tau", c.tau);
  c.lr = config.get_double("pretrain.lr", c.lr);
  c.momentum = config.get_double("pretrain.momentum", c.momentum);
  c.weight_decay = config.get_double("pretrain.weight_decay", c.weight_decay);
  c.cosine_decay = config.get_bool("pretrain.cosine_decay", c.cosine_decay);
  c.seed = static_cast<std::uint64_t>(config.get_int("pretrain.seed", static_cast<long long>(c.seed)));
  c.augment = augment::AugmentParams::from_config(config, augment::simclr_view_params());
  return c;
}

nlohmann::json PretrainConfig::to_json() const {
  return {{"epochs", epochs},   {"batch_pairs", batch_pairs},   {"tau", tau},
          {"lr", lr},           {"momentum", momentum},         {"weight_decay", weight_decay},
          {"cosine_decay", cosine_decay}, {"seed", seed}, {"augment", augment.to_config_text()}};
}

std::vector<double> pretrain(nn::Encoder &encoder, nn::Mlp &head, const ImageSource &data,
                             const PretrainConfig &config, const EpochCallback &on_epoch) {
  config.validate();
  require(data.size() > 0, "pretraining corpus is empty");
  require(static_cast<std::size_t>(config.batch_pairs) <= data.size(), "batch_pairs exceeds the corpus size");
  require(head.dims().front() == encoder.spec().feature_dim, "projection head input must match feature_dim");

  const std::size_t n = data.size();
  const auto pairs = static_cast<std::size_t>(config.batch_pairs);
  std::size_t steps_per_epoch = n / pairs + ((n % pairs) >= 2 ? 1 : 0);
  const std::size_t total_steps = steps_per_epoch * static_cast<std::size_t>(config.epochs);

  nn::Sgd sgd({&encoder.params(), &head.params()}, {config.momentum, config.weight_decay});
  std::vector<double> curve;
  std::vector<std::size_t> order(n);
  std::size_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix_seed(config.seed, 0x5EED, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += pairs) {
      const std::size_t count = std::min(pairs, n - start);
      if (count < 2) break;
      const auto views = static_cast<Eigen::Index>(2 * count);
      std::vector<nn::EncoderTrace> enc_traces(2 * count);
      std::vector<nn::MlpTrace> head_traces(2 * count);
      EmbeddingBatch z(views, head.dims().back());
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t idx = order[start + k];
        const std::uint64_t draw = static_cast<std::uint64_t>(epoch) * n + idx;
        auto [a, b] = augment::simclr_view_pair(data.image(idx), config.seed, draw, config.augment);
        const ImageTensor *pair[2] = {&a, &b};
        for (int v = 0; v < 2; ++v) {
          const std::size_t row = 2 * k + v;
          nn::Vector h = encoder.forward(*pair[v], &enc_traces[row]);
          nn::Vector out = head.forward(h, &head_traces[row]);
          z.row(static_cast<Eigen::Index>(row)) = out.cast<double>().transpose();
        }
      }
      if (!z.allFinite() || (z.rowwise().norm().array() == 0.0).any()) {
        throw TrainingDivergedError("projection collapsed or diverged in epoch " + std::to_string(epoch), epoch);
      }
      NtXentResult loss = nt_xent_loss_and_gradient(z, config.tau);
      if (!std::isfinite(loss.loss)) {
        throw TrainingDivergedError("non-finite NT-Xent loss in epoch " + std::to_string(epoch), epoch);
      }

      nn::Gradients enc_grads = nn::zeros_like(encoder.params());
      nn::Gradients head_grads = nn::zeros_like(head.params());
      for (Eigen::Index row = 0; row < views; ++row) {
        nn::Vector dz = loss.gradient.row(row).transpose().cast<float>();
        nn::Vector dh = head.backward(head_traces[row], dz, head_grads);
        encoder.backward(enc_traces[row], dh, enc_grads);
      }
      const double lr = config.cosine_decay ? nn::cosine_lr(config.lr, step, total_steps) : config.lr;
      sgd.step({&enc_grads, &head_grads}, lr);
      ++step;
      epoch_loss += loss.loss;
      ++batches;
    }
    const double mean = batches ? epoch_loss / static_cast<double>(batches) : 0.0;
    if (!std::isfinite(mean)) {
      throw TrainingDivergedError("non-finite NT-Xent loss in epoch " + std::to_string(epoch), epoch);
    }
    curve.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return curve;
}

Checkpoint make_checkpoint(const nn::Encoder &encoder, const nn::Mlp &head, const PretrainConfig &config,
                           const std::vector<double> &loss_curve, std::uint64_t corpus_fingerprint) {
  Checkpoint ck;
  ck.kind = "simclr";
  ck.encoder = encoder.spec();
  ck.stores["encoder"] = encoder.params();
  ck.stores["projection"] = head.params();
  ck.mlp_dims["projection"] = head.dims();
  ck.metadata = {{"config", config.to_json()},
                 {"seed", config.seed},
                 {"tau", config.tau},
                 {"epochs", config.epochs},
                 {"loss_curve", loss_curve},
                 {"corpus_fingerprint", hex64(corpus_fingerprint)}};
  return ck;
}

}  // namespace rashdx::simclr
