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
#ifndef RASHDX_SYNTHETIC_HPP_
#define RASHDX_SYNTHETIC_HPP_

// Procedural eight-class geometric-shape corpora standing in for the skin
// image datasets in tests, demos and pipeline health checks. Shape k is
// rendered for class index k.

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "rashdx/datakit.hpp"
#include "rashdx/source.hpp"

namespace rashdx::synthetic {

enum class Shape { kCircle, kSquare, kTriangle, kPlus, kRing, kDiamond, kBar, kCross };

struct ShapeStyle {
  int size = 64;
  double min_radius = 0.22;  // fraction of the image side
  double max_radius = 0.36;
  double noise_sigma = 0.03;
};

/// One shape on a flat background with random colours (foreground/
/// background luma differ by at least 0.3), random position and radius,
/// and additive noise.
ImageTensor render_shape(Shape shape, const ShapeStyle &style, std::mt19937_64 &rng);

/// A small shape centred in quadrant `quadrant` (0 top-left, 1 top-right,
/// 2 bottom-left, 3 bottom-right); the other three quadrants hold only
/// background and noise.
ImageTensor render_in_quadrant(Shape shape, int quadrant, int size, std::mt19937_64 &rng);

/// `per_class` images of each of the eight shapes, class-interleaved.
InMemorySource shapes_dataset(std::size_t per_class, const ShapeStyle &style, std::uint64_t seed);

/// Same shapes, placed in random quadrants (for localization checks).
InMemorySource quadrant_dataset(std::size_t per_class, int size, std::uint64_t seed);

/// `count` unlabeled images of uniformly drawn shapes.
InMemorySource unlabeled_shapes(std::size_t count, const ShapeStyle &style, std::uint64_t seed);

/// Writes a shapes corpus as PNGs under `dir/<Class>/` and returns the
/// manifest (base directory `dir`). Unlabeled when `labeled` is false.
datakit::DatasetManifest write_shapes_corpus(const std::filesystem::path &dir, std::size_t per_class,
                                             const ShapeStyle &style, std::uint64_t seed, bool labeled = true);

}  // namespace rashdx::synthetic

#endif  // RASHDX_SYNTHETIC_HPP_
