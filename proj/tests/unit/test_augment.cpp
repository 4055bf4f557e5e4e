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
#include "rashdx/augment.hpp"
#include "rashdx/error.hpp"

using namespace rashdx;
using namespace rashdx::augment;

namespace {

constexpr OpKind kAllOps[] = {
    OpKind::kGaussianNoise, OpKind::kCropAndResize, OpKind::kAffine,      OpKind::kCutout,      OpKind::kFlipHorizontal,
    OpKind::kFlipVertical,  OpKind::kGammaContrast, OpKind::kGaussianBlur, OpKind::kColorJitter,
};

}  // namespace

TEST(Augment, OpNamesRoundTrip) {
  for (OpKind k : kAllOps) EXPECT_EQ(parse_op(name_of(k)), k);
  EXPECT_FALSE(parse_op("Sharpen").has_value());
}

TEST(Augment, IdentityPolicyIsExact) {
  auto img = fixtures::random_image(31, 37, 1);
  AugmentationPolicy none;
  EXPECT_EQ(apply_policy(img, none, 5), img);
  AugmentationPolicy never = expansion_policy(3);
  never.per_op_probability = 0.0;
  EXPECT_EQ(apply_policy(img, never, 5), img);
}

TEST(Augment, FlipsAreInvolutions) {
  auto img = fixtures::random_image(20, 33, 2);
  std::mt19937_64 rng(0);
  for (OpKind k : {OpKind::kFlipHorizontal, OpKind::kFlipVertical}) {
    auto once = apply_op(img, k, {}, rng);
    EXPECT_NE(once, img);
    EXPECT_EQ(apply_op(once, k, {}, rng), img);
  }
  auto h = apply_op(img, OpKind::kFlipHorizontal, {}, rng);
  EXPECT_FLOAT_EQ(h.at(3, 0, 1), img.at(3, 32, 1));
}

TEST(Augment, EveryOpStaysInRangeAndShape) {
  auto img = fixtures::random_image(kInputSize, kInputSize, 3);
  for (OpKind k : kAllOps) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      std::mt19937_64 rng(s);
      auto out = apply_op(img, k, {}, rng);
      EXPECT_EQ(out.height(), kInputSize) << name_of(k);
      EXPECT_EQ(out.width(), kInputSize) << name_of(k);
      EXPECT_TRUE(out.valid()) << name_of(k);
    }
  }
}

TEST(Augment, PolicyIsBitReproducible) {
  auto img = fixtures::random_image(64, 48, 4);
  auto policy = expansion_policy(11);
  policy.per_op_probability = 1.0;
  policy.output_size = kInputSize;
  auto a = apply_policy(img, policy, 9);
  EXPECT_EQ(a, apply_policy(img, policy, 9));
  EXPECT_NE(a, apply_policy(img, policy, 10));
  EXPECT_EQ(a.height(), kInputSize);
  EXPECT_TRUE(a.valid());
}

TEST(Augment, ViewPairsDifferButReproduce) {
  auto img = fixtures::random_image(96, 96, 5);
  auto [a, b] = simclr_view_pair(img, 1, 2);
  EXPECT_EQ(a.height(), kInputSize);
  EXPECT_NE(a, b);
  auto [c, d] = simclr_view_pair(img, 1, 2);
  EXPECT_EQ(a, c);
  EXPECT_EQ(b, d);
}

TEST(Augment, ParamsValidation) {
  AugmentParams p;
  p.validate();
  p.gamma = {1.5, 0.7};
  EXPECT_THROW(p.validate(), ValidationError);
  AugmentParams q;
  q.crop_scale = {0.0, 1.0};
  EXPECT_THROW(q.validate(), ValidationError);
  auto cfg = KeyValueConfig::parse(AugmentParams{}.to_config_text());
  auto back = AugmentParams::from_config(cfg);
  EXPECT_DOUBLE_EQ(back.gamma.hi, AugmentParams{}.gamma.hi);
}

TEST(Expansion, DefaultTargetsReachTotal) {
  auto counts = fixtures::data_a_counts();
  auto targets = default_expansion_targets(counts, default_scarce_classes(), 4831);
  std::size_t total = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto it = targets.find(kAllClasses[c]);
    const std::size_t n = it == targets.end() ? counts[c] : it->second;
    EXPECT_GE(n, counts[c]);
    total += n;
  }
  EXPECT_EQ(total, 4831u);
  EXPECT_THROW(default_expansion_targets(counts, default_scarce_classes(), 3000), ContractError);
}

TEST(Expansion, WritesExactlyTheTargets) {
  fixtures::TempDir dir("expand");
  datakit::ClassCounts counts{2, 1, 3, 1, 2, 1, 1, 2};
  std::vector<datakit::ImageRecord> records;
  int k = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      datakit::ImageRecord r;
      r.path = "in/" + std::to_string(k) + ".png";
      r.label = kAllClasses[c];
      std::filesystem::create_directories(dir / "in");
      write_png(quantize8(fixtures::random_image(12, 12, k++)), dir / r.path);
      records.push_back(r);
    }
  }
  datakit::DatasetManifest m("small", dir.path(), records);
  ExpansionTargets targets{{ClassLabel::kMeasles, 5}, {ClassLabel::kMpox, 4}};
  auto out = expand_scarce_classes(m, targets, expansion_policy(1), dir / "aug");
  auto got = datakit::class_distribution(out);
  EXPECT_EQ(got[index_of(ClassLabel::kMeasles)], 5u);
  EXPECT_EQ(got[index_of(ClassLabel::kMpox)], 4u);
  EXPECT_EQ(got[index_of(ClassLabel::kEczema)], 3u);
  EXPECT_EQ(out.size(), m.size() + 4 + 2);
  for (const auto &r : out.records()) EXPECT_TRUE(std::filesystem::exists(out.resolve(r))) << r.path;
}
