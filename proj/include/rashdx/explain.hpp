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
#ifndef RASHDX_EXPLAIN_HPP_
#define RASHDX_EXPLAIN_HPP_

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rashdx/image.hpp"
#include "rashdx/labels.hpp"
#include "rashdx/trainer.hpp"

namespace rashdx::explain {

/// Relevance grid in [0, 1], row-major. Max-normalized: the peak is 1
/// unless the whole map is zero.
struct Heatmap {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
  float max() const;
  /// (row, col) of the first maximal cell in row-major order.
  std::pair<int, int> argmax() const;
};

/// Grad-CAM over the encoder's last spatial stage: channel weights are the
/// spatial means of d(score[target]) / d(activation); the map is the ReLU
/// of the weighted channel sum, bilinearly upsampled to 224x224 and divided
/// by its maximum. Throws UnsupportedArchitectureError for encoders without
/// a spatial stage.
Heatmap gradcam_heatmap(const trainer::ClassifierModel &model, const ImageTensor &image, ClassLabel target);

/// The coarse (pre-upsampling, unnormalized) rectified map.
Heatmap gradcam_raw(const trainer::ClassifierModel &model, const ImageTensor &image, ClassLabel target);

/// Piecewise-linear blue (0) -> yellow (0.5) -> red (1).
std::array<float, 3> relevance_colour(float value);

/// (1 - alpha) * image + alpha * colour(heatmap). ContractError when the
/// sizes differ or alpha is outside [0, 1].
ImageTensor colorize_overlay(const Heatmap &heatmap, const ImageTensor &image, double alpha);

/// Row-per-line CSV of the heatmap values.
void write_heatmap_csv(const Heatmap &heatmap, const std::filesystem::path &path);

}  // namespace rashdx::explain

#endif  // RASHDX_EXPLAIN_HPP_
