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
#ifndef RASHDX_NN_HPP_
#define RASHDX_NN_HPP_

// Minimal CPU network toolkit: convolutional/dense encoders, MLP heads and
// momentum SGD, with explicit forward traces so that every backward pass
// (training, Grad-CAM) is a pure function of the frozen weights.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rashdx/image.hpp"

namespace rashdx::nn {

using Matrix = Eigen::MatrixXf;
using Vector = Eigen::VectorXf;

/// Named parameter tensors. Biases are stored as n x 1 matrices.
struct ParamStore {
  std::vector<std::string> names;
  std::vector<Matrix> values;

  std::size_t add(std::string name, Matrix value);
  std::size_t count() const;  // total scalar parameters
  friend bool operator==(const ParamStore &, const ParamStore &) = default;
};

/// Gradient buffers parallel to a ParamStore's values.
using Gradients = std::vector<Matrix>;
Gradients zeros_like(const ParamStore &store);
void scale(Gradients &grads, float factor);
void accumulate(Gradients &into, const Gradients &from);

/// A C x (H*W) activation map; column p holds the channels of pixel p.
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  Matrix data;
};

/// One convolution + ReLU stage.
struct ConvLayer {
  int in_channels;
  int out_channels;
  int kernel;
  int stride;
  int pad;
  std::size_t weight;  // index into the encoder ParamStore
  std::size_t bias;
};

/// Backbone description. Every backbone starts with a fixed average-pool
/// stem of `stem_pool` over the 224x224 input and input centring.
struct EncoderSpec {
  std::string name;
  int feature_dim = 0;
  int stem_pool = 4;
  std::vector<int> conv_channels;  // 3x3 stride-2 stages; empty for dense backbones
  int dense_hidden = 0;            // dense backbones only: flatten -> feature_dim

  bool spatial() const { return !conv_channels.empty(); }
};

/// Registered backbones: "tiny_cnn" (64-d), "small_cnn" (128-d) and the
/// non-spatial "tiny_mlp" (64-d).
EncoderSpec encoder_spec(const std::string &name);
std::vector<std::string> encoder_names();

struct EncoderTrace {
  FeatureMap input;              // after stem
  std::vector<Matrix> cols;      // im2col per conv stage
  std::vector<FeatureMap> maps;  // post-ReLU output per conv stage
  Vector dense_pre;              // dense backbones: pre-activation
};

class Encoder {
 public:
  Encoder() = default;
  Encoder(EncoderSpec spec, std::uint64_t seed);

  const EncoderSpec &spec() const { return spec_; }
  ParamStore &params() { return params_; }
  const ParamStore &params() const { return params_; }

  /// Feature vector h for a preprocessed 224x224 image.
  Vector forward(const ImageTensor &image, EncoderTrace *trace) const;

  /// Backpropagates dL/dh. Parameter gradients are accumulated into
  /// `grads` (parallel to params()).
  void backward(const EncoderTrace &trace, const Vector &d_feature, Gradients &grads) const;

  /// Output of the last spatial stage, the Grad-CAM target layer.
  /// Throws UnsupportedArchitectureError for dense backbones.
  const FeatureMap &target_layer(const EncoderTrace &trace) const;

  /// dL/d(target layer) given dL/dh, through the global average pool.
  FeatureMap target_layer_gradient(const EncoderTrace &trace, const Vector &d_feature) const;

 private:
  EncoderSpec spec_;
  ParamStore params_;
  std::vector<ConvLayer> convs_;
  std::size_t dense_w_ = 0, dense_b_ = 0;
};

struct MlpTrace {
  std::vector<Vector> inputs;  // input to each layer
  std::vector<Vector> pre;     // pre-activation of each layer
};

/// Dense layers with ReLU between them (none after the last).
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> dims, std::uint64_t seed, bool zero_init = false);

  const std::vector<int> &dims() const { return dims_; }
  ParamStore &params() { return params_; }
  const ParamStore &params() const { return params_; }

  Vector forward(const Vector &x, MlpTrace *trace) const;
  /// Returns dL/dx; accumulates parameter gradients into `grads`.
  Vector backward(const MlpTrace &trace, const Vector &dy, Gradients &grads) const;

  Matrix &weight(std::size_t layer) { return params_.values[2 * layer]; }
  Matrix &bias(std::size_t layer) { return params_.values[2 * layer + 1]; }

 private:
  std::vector<int> dims_;
  ParamStore params_;
};

struct SgdConfig {
  double momentum = 0.9;
  double weight_decay = 0.0;
};

/// Momentum SGD over one or more ParamStores (v = m v + g; w -= lr v).
class Sgd {
 public:
  Sgd(std::vector<ParamStore *> stores, SgdConfig config);
  void step(const std::vector<const Gradients *> &grads, double lr);

 private:
  std::vector<ParamStore *> stores_;
  std::vector<Gradients> velocity_;
  SgdConfig config_;
};

/// Half-cosine decay from base_lr to zero over `total` steps.
double cosine_lr(double base_lr, std::size_t step, std::size_t total);

/// Numerically stable softmax in double precision.
std::vector<double> softmax(const Vector &logits);

/// Bilinear upsampling of a single-channel h x w grid (row-major) to
/// out_h x out_w with half-pixel centres.
std::vector<float> upsample_bilinear(const std::vector<float> &grid, int h, int w, int out_h, int out_w);

}  // namespace rashdx::nn

#endif  // RASHDX_NN_HPP_
