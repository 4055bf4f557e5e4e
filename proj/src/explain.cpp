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
#include "rashdx/explain.hpp"

#include <algorithm>
#include <fstream>

#include "rashdx/error.hpp"

namespace rashdx::explain {

float Heatmap::max() const { return values.empty() ? 0.0f : *std::max_element(values.begin(), values.end()); }

std::pair<int, int> Heatmap::argmax() const {
  require(!values.empty(), "argmax of an empty heatmap");
  auto idx = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
  return {idx / width, idx % width};
}

Heatmap gradcam_raw(const trainer::ClassifierModel &model, const ImageTensor &image, ClassLabel target) {
  if (!model.encoder.spec().spatial()) {
    throw UnsupportedArchitectureError("encoder '" + model.encoder.spec().name +
                                       "' has no spatial feature layer for Grad-CAM");
  }
  ImageTensor x = preprocess(image);
  nn::EncoderTrace trace;
  nn::MlpTrace head_trace;
  nn::Vector h = model.encoder.forward(x, &trace);
  model.head.forward(h, &head_trace);

  nn::Vector one_hot = nn::Vector::Zero(static_cast<Eigen::Index>(kNumClasses));
  one_hot[index_of(target)] = 1.0f;
  nn::Gradients scratch = nn::zeros_like(model.head.params());
  nn::Vector dh = model.head.backward(head_trace, one_hot, scratch);

  const nn::FeatureMap &act = model.encoder.target_layer(trace);
  nn::FeatureMap grad = model.encoder.target_layer_gradient(trace, dh);
  nn::Vector weights = grad.data.rowwise().mean();
  Eigen::RowVectorXf cam = (weights.transpose() * act.data).cwiseMax(0.0f);

  Heatmap out;
  out.height = act.height;
  out.width = act.width;
  out.values.assign(cam.data(), cam.data() + cam.size());
  return out;
}

Heatmap gradcam_heatmap(const trainer::ClassifierModel &model, const ImageTensor &image, ClassLabel target) {
  Heatmap raw = gradcam_raw(model, image, target);
  Heatmap out;
  out.height = kInputSize;
  out.width = kInputSize;
  out.values = nn::upsample_bilinear(raw.values, raw.height, raw.width, kInputSize, kInputSize);
  const float peak = out.max();
  if (peak > 0.0f) {
    for (float &v : out.values) v = std::min(v / peak, 1.0f);
  } else {
    std::fill(out.values.begin(), out.values.end(), 0.0f);
  }
  return out;
}

std::array<float, 3> relevance_colour(float value) {
  const float t = std::clamp(value, 0.0f, 1.0f);
  if (t <= 0.5f) {
    const float s = 2.0f * t;
    return {s, s, 1.0f - s};
  }
  return {1.0f, 2.0f - 2.0f * t, 0.0f};
}

ImageTensor colorize_overlay(const Heatmap &heatmap, const ImageTensor &image, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "overlay alpha must lie in [0, 1]");
  require(heatmap.height == image.height() && heatmap.width == image.width(),
          "heatmap and image dimensions disagree");
  require_valid(image);
  const auto a = static_cast<float>(alpha);
  ImageTensor out(image.height(), image.width());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      auto colour = relevance_colour(heatmap.at(y, x));
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = std::clamp((1.0f - a) * image.at(y, x, c) + a * colour[c], 0.0f, 1.0f);
      }
    }
  return out;
}

void write_heatmap_csv(const Heatmap &heatmap, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(8);
  for (int y = 0; y < heatmap.height; ++y) {
    for (int x = 0; x < heatmap.width; ++x) out << (x ? "," : "") << heatmap.at(y, x);
    out << '\n';
  }
}

}  // namespace rashdx::explain
