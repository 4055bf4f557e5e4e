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
#ifndef RASHDX_AUGMENT_HPP_
#define RASHDX_AUGMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rashdx/datakit.hpp"
#include "rashdx/image.hpp"
#include "rashdx/util.hpp"

namespace rashdx::augment {

enum class OpKind {
  kGaussianNoise,
  kCropAndResize,
  kAffine,
  kCutout,
  kFlipHorizontal,
  kFlipVertical,
  kGammaContrast,
  kGaussianBlur,
  kColorJitter,
};

std::string_view name_of(OpKind kind);
/// Accepts the CamelCase names returned by name_of.
std::optional<OpKind> parse_op(std::string_view name);

struct Range {
  double lo;
  double hi;
};

/// Sampling ranges of every operator. Defaults are mid-strength values; all
/// of them may be overridden from a flat key-value file (see to_config_text
/// for the key names).
struct AugmentParams {
  Range noise_sigma{0.01, 0.05};
  Range crop_scale{0.6, 1.0};      // fraction of the image area kept
  Range crop_aspect{3.0 / 4.0, 4.0 / 3.0};
  Range rotation_deg{-25.0, 25.0};
  double max_translate = 0.10;     // fraction of width/height
  double max_shear_deg = 8.0;
  Range cutout_fraction{0.10, 0.20};  // side, as a fraction of min(h, w)
  Range gamma{0.7, 1.5};
  Range blur_sigma{0.5, 1.5};
  Range brightness{0.6, 1.4};
  Range contrast{0.6, 1.4};
  Range saturation{0.6, 1.4};
  Range hue_shift{-0.1, 0.1};      // fraction of the hue circle

  /// Throws ValidationError for inverted or out-of-domain ranges.
  void validate() const;

  /// Reads `augment.*` keys over `base`, keeping its values for missing ones.
  static AugmentParams from_config(const KeyValueConfig &config, const AugmentParams &base);
  static AugmentParams from_config(const KeyValueConfig &config) { return from_config(config, AugmentParams{}); }
  std::string to_config_text() const;
};

struct AugmentationPolicy {
  std::vector<OpKind> ops;
  AugmentParams params;
  double per_op_probability = 0.5;
  bool shuffle_order = true;
  std::uint64_t seed = 0;
  int output_size = 0;  // square resize after the last op; 0 keeps the input size
};

/// The eight-operator composite used to expand scarce classes.
AugmentationPolicy expansion_policy(std::uint64_t seed);

/// Applies one operator with parameters drawn from `rng`. The output has
/// the input's dimensions and stays within [0, 1]. `crop_output` overrides
/// the CropAndResize output size when positive.
ImageTensor apply_op(const ImageTensor &image, OpKind kind, const AugmentParams &params, std::mt19937_64 &rng,
                     int crop_output = 0);

/// Pure function of (image, policy, draw): each op is kept with
/// probability per_op_probability, the kept ops are shuffled when
/// shuffle_order is set, then applied in sequence.
ImageTensor apply_policy(const ImageTensor &image, const AugmentationPolicy &policy, std::uint64_t draw);

/// Ranges for contrastive views. Colour distortion is much stronger than
/// the expansion defaults: with mild jitter the two views of an image share
/// its colour histogram and the encoder learns little else.
AugmentParams simclr_view_params();

/// Two independent CropAndResize(224) + ColorJitter views of one image.
std::pair<ImageTensor, ImageTensor> simclr_view_pair(const ImageTensor &image, std::uint64_t seed, std::uint64_t draw,
                                                     const AugmentParams &params = simclr_view_params());

using ExpansionTargets = std::map<ClassLabel, std::size_t>;

/// Raises the listed classes towards a common level so the corpus reaches
/// `total` records: the lowest classes are filled first, leftover units go
/// to the lowest class indices. Classes already above the level keep their
/// counts. Throws ContractError when `total` is below the current size or
/// cannot be reached by the listed classes alone.
ExpansionTargets default_expansion_targets(const datakit::ClassCounts &counts,
                                           const std::vector<ClassLabel> &classes, std::size_t total);

/// The five classes expanded by default.
std::vector<ClassLabel> default_scarce_classes();

/// Generates augmented copies until each targeted class reaches its target.
/// Generated images go to `output_dir/<Class>/<stem>__aug<draw>.png`,
/// cycling over the class's originals in manifest order; their `source`
/// column is `augmented:<original path>`. Originals are kept untouched.
datakit::DatasetManifest expand_scarce_classes(const datakit::DatasetManifest &manifest,
                                               const ExpansionTargets &targets, const AugmentationPolicy &policy,
                                               const std::filesystem::path &output_dir);

}  // namespace rashdx::augment

#endif  // RASHDX_AUGMENT_HPP_
