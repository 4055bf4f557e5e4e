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
#include "rashdx/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rashdx/error.hpp"
#include "rashdx/util.hpp"

namespace rashdx::nn {

std::size_t ParamStore::add(std::string name, Matrix value) {
  names.push_back(std::move(name));
  values.push_back(std::move(value));
  return values.size() - 1;
}

std::size_t ParamStore::count() const {
  std::size_t n = 0;
  for (const auto &v : values) n += static_cast<std::size_t>(v.size());
  return n;
}

Gradients zeros_like(const ParamStore &store) {
  Gradients g;
  g.reserve(store.values.size());
  for (const auto &v : store.values) g.push_back(Matrix::Zero(v.rows(), v.cols()));
  return g;
}

void scale(Gradients &grads, float factor) {
  for (auto &g : grads) g *= factor;
}

void accumulate(Gradients &into, const Gradients &from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

namespace {

Matrix he_normal(int rows, int cols, int fan_in, std::mt19937_64 &rng) {
  std::normal_distribution<float> dist(0.0f, std::sqrt(2.0f / static_cast<float>(fan_in)));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

// Average-pools the HWC image by `pool`, then standardizes per image: each
// channel loses its mean and the whole map is divided by its RMS deviation,
// so a flat background carries no signal whatever its colour.
FeatureMap stem(const ImageTensor &image, int pool) {
  require(image.height() == kInputSize && image.width() == kInputSize,
          "encoder input must be preprocessed to 224x224");
  FeatureMap out;
  out.channels = 3;
  out.height = kInputSize / pool;
  out.width = kInputSize / pool;
  out.data = Matrix::Zero(3, out.height * out.width);
  const float norm = 1.0f / static_cast<float>(pool * pool);
  for (int y = 0; y < kInputSize; ++y) {
    const int py = y / pool;
    for (int x = 0; x < kInputSize; ++x) {
      const int p = py * out.width + x / pool;
      for (int c = 0; c < 3; ++c) out.data(c, p) += image.at(y, x, c);
    }
  }
  out.data *= norm;
  out.data.colwise() -= out.data.rowwise().mean();
  const float rms = std::sqrt(out.data.squaredNorm() / static_cast<float>(out.data.size()));
  out.data /= std::max(rms, 1e-2f);
  return out;
}

// Patch rows are ordered (ky, kx, channel) so that each channel run is
// contiguous in both the input map and the patch matrix.
void im2col(const FeatureMap &in, const ConvLayer &l, int out_h, int out_w, Matrix &cols) {
  const int k = l.kernel, cin = in.channels;
  cols.setZero(k * k * cin, out_h * out_w);
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      float *col = cols.col(oy * out_w + ox).data();
      for (int ky = 0; ky < k; ++ky) {
        const int iy = oy * l.stride - l.pad + ky;
        if (iy < 0 || iy >= in.height) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int ix = ox * l.stride - l.pad + kx;
          if (ix < 0 || ix >= in.width) continue;
          const float *src = in.data.col(iy * in.width + ix).data();
          std::copy(src, src + cin, col + (ky * k + kx) * cin);
        }
      }
    }
  }
}

void col2im(const Matrix &dcols, const ConvLayer &l, int out_h, int out_w, FeatureMap &din) {
  const int k = l.kernel, cin = din.channels;
  din.data.setZero();
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      const float *col = dcols.col(oy * out_w + ox).data();
      for (int ky = 0; ky < k; ++ky) {
        const int iy = oy * l.stride - l.pad + ky;
        if (iy < 0 || iy >= din.height) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int ix = ox * l.stride - l.pad + kx;
          if (ix < 0 || ix >= din.width) continue;
          float *dst = din.data.col(iy * din.width + ix).data();
          const float *src = col + (ky * k + kx) * cin;
          for (int c = 0; c < cin; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

int conv_out(int in, const ConvLayer &l) { return (in + 2 * l.pad - l.kernel) / l.stride + 1; }

}  // namespace

EncoderSpec encoder_spec(const std::string &name) {
  if (name == "tiny_cnn") return {"tiny_cnn", 64, 4, {16, 32, 64}, 0};
  if (name == "small_cnn") return {"small_cnn", 128, 2, {16, 32, 64, 128}, 0};
  if (name == "tiny_mlp") return {"tiny_mlp", 64, 16, {}, 64};
  throw ContractError("unknown encoder '" + name + "'");
}

std::vector<std::string> encoder_names() { return {"tiny_cnn", "small_cnn", "tiny_mlp"}; }

Encoder::Encoder(EncoderSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  require(spec_.stem_pool > 0 && kInputSize % spec_.stem_pool == 0, "stem_pool must divide 224");
  std::mt19937_64 rng(mix_seed(seed, 0xE1));
  if (spec_.spatial()) {
    require(spec_.conv_channels.back() == spec_.feature_dim, "feature_dim must equal the last conv width");
    int in = 3;
    for (std::size_t i = 0; i < spec_.conv_channels.size(); ++i) {
      const int out = spec_.conv_channels[i];
      ConvLayer l{in, out, 3, 2, 1, 0, 0};
      const std::string prefix = "conv" + std::to_string(i);
      l.weight = params_.add(prefix + ".weight", he_normal(out, 9 * in, 9 * in, rng));
      l.bias = params_.add(prefix + ".bias", Matrix::Zero(out, 1));
      convs_.push_back(l);
      in = out;
    }
  } else {
    require(spec_.dense_hidden == spec_.feature_dim, "dense backbones map straight to feature_dim");
    const int side = kInputSize / spec_.stem_pool;
    const int fan_in = 3 * side * side;
    dense_w_ = params_.add("dense.weight", he_normal(spec_.feature_dim, fan_in, fan_in, rng));
    dense_b_ = params_.add("dense.bias", Matrix::Zero(spec_.feature_dim, 1));
  }
}

Vector Encoder::forward(const ImageTensor &image, EncoderTrace *trace) const {
  FeatureMap x = stem(image, spec_.stem_pool);
  if (!spec_.spatial()) {
    Eigen::Map<const Vector> flat(x.data.data(), x.data.size());
    Vector pre = params_.values[dense_w_] * flat + params_.values[dense_b_].col(0);
    if (trace) {
      trace->input = x;
      trace->dense_pre = pre;
    }
    return pre.cwiseMax(0.0f);
  }

  if (trace) {
    trace->cols.resize(convs_.size());
    trace->maps.resize(convs_.size());
  }
  Matrix local_cols;
  FeatureMap cur = std::move(x);
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    const ConvLayer &l = convs_[i];
    const int oh = conv_out(cur.height, l), ow = conv_out(cur.width, l);
    Matrix &cols = trace ? trace->cols[i] : local_cols;
    im2col(cur, l, oh, ow, cols);
    FeatureMap out{l.out_channels, oh, ow, Matrix()};
    out.data.noalias() = params_.values[l.weight] * cols;
    out.data.colwise() += params_.values[l.bias].col(0);
    out.data = out.data.cwiseMax(0.0f);
    if (trace) {
      if (i == 0) trace->input = std::move(cur);
      cur = out;
      trace->maps[i] = std::move(out);
    } else {
      cur = std::move(out);
    }
  }
  return cur.data.rowwise().mean();
}

const FeatureMap &Encoder::target_layer(const EncoderTrace &trace) const {
  if (!spec_.spatial()) {
    throw UnsupportedArchitectureError("encoder '" + spec_.name + "' has no spatial feature layer");
  }
  return trace.maps.back();
}

FeatureMap Encoder::target_layer_gradient(const EncoderTrace &trace, const Vector &d_feature) const {
  const FeatureMap &last = target_layer(trace);
  FeatureMap g{last.channels, last.height, last.width, Matrix()};
  const float inv = 1.0f / static_cast<float>(last.height * last.width);
  g.data = (d_feature * inv).replicate(1, last.height * last.width);
  return g;
}

void Encoder::backward(const EncoderTrace &trace, const Vector &d_feature, Gradients &grads) const {
  if (!spec_.spatial()) {
    Vector d_pre = (trace.dense_pre.array() > 0.0f).select(d_feature, 0.0f);
    Eigen::Map<const Vector> flat(trace.input.data.data(), trace.input.data.size());
    grads[dense_w_].noalias() += d_pre * flat.transpose();
    grads[dense_b_].col(0) += d_pre;
    return;
  }
  FeatureMap d_out = target_layer_gradient(trace, d_feature);
  for (std::size_t i = convs_.size(); i-- > 0;) {
    const ConvLayer &l = convs_[i];
    const FeatureMap &out = trace.maps[i];
    Matrix d_pre = (out.data.array() > 0.0f).select(d_out.data, 0.0f);
    grads[l.weight].noalias() += d_pre * trace.cols[i].transpose();
    grads[l.bias].col(0) += d_pre.rowwise().sum();
    if (i == 0) break;
    Matrix d_cols = params_.values[l.weight].transpose() * d_pre;
    const FeatureMap &in = trace.maps[i - 1];
    FeatureMap d_in{in.channels, in.height, in.width, Matrix(in.channels, in.height * in.width)};
    col2im(d_cols, l, out.height, out.width, d_in);
    d_out = std::move(d_in);
  }
}

Mlp::Mlp(std::vector<int> dims, std::uint64_t seed, bool zero_init) : dims_(std::move(dims)) {
  require(dims_.size() >= 2, "an MLP needs at least input and output dims");
  std::mt19937_64 rng(mix_seed(seed, 0xA7));
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const int in = dims_[l], out = dims_[l + 1];
    require(in > 0 && out > 0, "MLP dims must be positive");
    Matrix w = zero_init ? Matrix::Zero(out, in) : Matrix(he_normal(out, in, in, rng));
    params_.add("fc" + std::to_string(l) + ".weight", std::move(w));
    params_.add("fc" + std::to_string(l) + ".bias", Matrix::Zero(out, 1));
  }
}

Vector Mlp::forward(const Vector &x, MlpTrace *trace) const {
  const std::size_t layers = dims_.size() - 1;
  require(x.size() == dims_.front(), "MLP input has wrong dimension");
  if (trace) {
    trace->inputs.resize(layers);
    trace->pre.resize(layers);
  }
  Vector cur = x;
  for (std::size_t l = 0; l < layers; ++l) {
    Vector pre = params_.values[2 * l] * cur + params_.values[2 * l + 1].col(0);
    if (trace) {
      trace->inputs[l] = cur;
      trace->pre[l] = pre;
    }
    cur = (l + 1 < layers) ? Vector(pre.cwiseMax(0.0f)) : pre;
  }
  return cur;
}

Vector Mlp::backward(const MlpTrace &trace, const Vector &dy, Gradients &grads) const {
  Vector d = dy;
  for (std::size_t l = dims_.size() - 1; l-- > 0;) {
    if (l + 2 < dims_.size()) d = (trace.pre[l].array() > 0.0f).select(d, 0.0f);
    grads[2 * l].noalias() += d * trace.inputs[l].transpose();
    grads[2 * l + 1].col(0) += d;
    d = params_.values[2 * l].transpose() * d;
  }
  return d;
}

Sgd::Sgd(std::vector<ParamStore *> stores, SgdConfig config) : stores_(std::move(stores)), config_(config) {
  for (auto *s : stores_) velocity_.push_back(zeros_like(*s));
}

void Sgd::step(const std::vector<const Gradients *> &grads, double lr) {
  require(grads.size() == stores_.size(), "one gradient set per parameter store");
  const auto m = static_cast<float>(config_.momentum);
  const auto wd = static_cast<float>(config_.weight_decay);
  const auto rate = static_cast<float>(lr);
  for (std::size_t s = 0; s < stores_.size(); ++s) {
    auto &values = stores_[s]->values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      Matrix &v = velocity_[s][i];
      v = m * v + (*grads[s])[i];
      if (wd != 0.0f) v += wd * values[i];
      values[i] -= rate * v;
    }
  }
}

double cosine_lr(double base_lr, std::size_t step, std::size_t total) {
  if (total == 0) return base_lr;
  double t = static_cast<double>(std::min(step, total)) / static_cast<double>(total);
  return 0.5 * base_lr * (1.0 + std::cos(std::numbers::pi * t));
}

std::vector<double> softmax(const Vector &logits) {
  std::vector<double> p(static_cast<std::size_t>(logits.size()));
  double mx = logits.size() ? static_cast<double>(logits.maxCoeff()) : 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    p[static_cast<std::size_t>(i)] = std::exp(static_cast<double>(logits[i]) - mx);
    sum += p[static_cast<std::size_t>(i)];
  }
  for (double &v : p) v /= sum;
  return p;
}

std::vector<float> upsample_bilinear(const std::vector<float> &grid, int h, int w, int out_h, int out_w) {
  require(static_cast<std::size_t>(h) * w == grid.size() && h > 0 && w > 0, "grid shape mismatch");
  std::vector<float> out(static_cast<std::size_t>(out_h) * out_w);
  const float sy = static_cast<float>(h) / out_h, sx = static_cast<float>(w) / out_w;
  for (int y = 0; y < out_h; ++y) {
    float src_y = std::max((y + 0.5f) * sy - 0.5f, 0.0f);
    int y0 = std::min(static_cast<int>(src_y), h - 1), y1 = std::min(y0 + 1, h - 1);
    float fy = src_y - y0;
    for (int x = 0; x < out_w; ++x) {
      float src_x = std::max((x + 0.5f) * sx - 0.5f, 0.0f);
      int x0 = std::min(static_cast<int>(src_x), w - 1), x1 = std::min(x0 + 1, w - 1);
      float fx = src_x - x0;
      float top = grid[y0 * w + x0] * (1 - fx) + grid[y0 * w + x1] * fx;
      float bottom = grid[y1 * w + x0] * (1 - fx) + grid[y1 * w + x1] * fx;
      out[static_cast<std::size_t>(y) * out_w + x] = top * (1 - fy) + bottom * fy;
    }
  }
  return out;
}

}  // namespace rashdx::nn
