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
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rashdx/error.hpp"
#include "rashdx/explain.hpp"

using namespace rashdx;
using namespace rashdx::explain;

TEST(GradCam, MapShapeAndRange) {
  auto m = trainer::make_classifier(nn::encoder_spec("tiny_cnn"), 1);
  auto img = fixtures::random_image(100, 120, 2);
  for (ClassLabel c : kAllClasses) {
    auto h = gradcam_heatmap(m, img, c);
    ASSERT_EQ(h.height, kInputSize);
    ASSERT_EQ(h.width, kInputSize);
    ASSERT_EQ(h.values.size(), static_cast<std::size_t>(kInputSize * kInputSize));
    for (float v : h.values) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
    EXPECT_TRUE(h.max() == 0.0f || h.max() == 1.0f);
  }
}

TEST(GradCam, InvariantToPositiveScoreScaling) {
  auto m = trainer::make_classifier(nn::encoder_spec("tiny_cnn"), 3);
  auto img = fixtures::random_image(kInputSize, kInputSize, 4);
  auto base = gradcam_heatmap(m, img, ClassLabel::kMpox);
  auto scaled = m;
  scaled.head.weight(0) *= 3.5f;
  scaled.head.bias(0) *= 3.5f;
  auto other = gradcam_heatmap(scaled, img, ClassLabel::kMpox);
  EXPECT_EQ(other.argmax(), base.argmax());
  for (std::size_t i = 0; i < base.values.size(); i += 97) EXPECT_NEAR(other.values[i], base.values[i], 1e-4);
}

TEST(GradCam, DenseBackboneIsUnsupported) {
  auto m = trainer::make_classifier(nn::encoder_spec("tiny_mlp"), 1);
  EXPECT_THROW(gradcam_heatmap(m, fixtures::random_image(32, 32, 1), ClassLabel::kMpox), UnsupportedArchitectureError);
}

TEST(GradCam, ArgmaxIsFirstMaximum) {
  Heatmap h{2, 3, {0.1f, 1.0f, 0.2f, 1.0f, 0.0f, 0.0f}};
  EXPECT_EQ(h.argmax(), std::make_pair(0, 1));
  EXPECT_FLOAT_EQ(h.max(), 1.0f);
}

TEST(GradCam, ColourRamp) {
  EXPECT_EQ(relevance_colour(0.0f), (std::array<float, 3>{0.0f, 0.0f, 1.0f}));
  EXPECT_EQ(relevance_colour(0.5f), (std::array<float, 3>{1.0f, 1.0f, 0.0f}));
  EXPECT_EQ(relevance_colour(1.0f), (std::array<float, 3>{1.0f, 0.0f, 0.0f}));
}

TEST(GradCam, Overlay) {
  ImageTensor img(4, 4, 0.0f);
  Heatmap h{4, 4, std::vector<float>(16, 1.0f)};
  auto out = colorize_overlay(h, img, 0.5);
  EXPECT_FLOAT_EQ(out.at(0, 0, 0), 0.5f);
  EXPECT_FLOAT_EQ(out.at(0, 0, 2), 0.0f);
  EXPECT_EQ(colorize_overlay(h, img, 0.0), img);
  EXPECT_THROW(colorize_overlay(h, img, 1.5), ContractError);
  EXPECT_THROW(colorize_overlay(h, ImageTensor(3, 4, 0.0f), 0.5), ContractError);
}
