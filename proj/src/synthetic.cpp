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
#include "rashdx/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "rashdx/error.hpp"
#include "rashdx/util.hpp"

namespace rashdx::synthetic {

namespace {

bool inside(Shape shape, double u, double v) {
  const double r2 = u * u + v * v;
  switch (shape) {
    case Shape::kCircle: return r2 <= 1.0;
    case Shape::kSquare: return std::abs(u) <= 0.8 && std::abs(v) <= 0.8;
    case Shape::kTriangle: return v <= 0.8 && v >= -0.9 && std::abs(u) <= (v + 0.9) / 1.7;
    case Shape::kPlus:
      return (std::abs(u) <= 0.25 && std::abs(v) <= 0.9) || (std::abs(v) <= 0.25 && std::abs(u) <= 0.9);
    case Shape::kRing: return r2 <= 1.0 && r2 >= 0.5;
    case Shape::kDiamond: return std::abs(u) + std::abs(v) <= 1.0;
    case Shape::kBar: return std::abs(u) <= 0.95 && std::abs(v) <= 0.3;
    case Shape::kCross:
      return std::abs(u) <= 0.85 && std::abs(v) <= 0.85 &&
             (std::abs(u - v) <= 0.28 || std::abs(u + v) <= 0.28);
  }
  return false;
}

using Rgb = std::array<float, 3>;

float luma(const Rgb &c) { return 0.299f * c[0] + 0.587f * c[1] + 0.114f * c[2]; }

std::pair<Rgb, Rgb> colours(std::mt19937_64 &rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (;;) {
    Rgb bg{u(rng), u(rng), u(rng)}, fg{u(rng), u(rng), u(rng)};
    if (std::abs(luma(bg) - luma(fg)) >= 0.3f) return {fg, bg};
  }
}

// 2x2 supersampled render of `shape` centred at (cx, cy) with radius r.
void draw(ImageTensor &img, Shape shape, double cx, double cy, double r, const Rgb &fg) {
  const int y_lo = std::max(0, static_cast<int>(cy - r) - 1), y_hi = std::min(img.height() - 1, static_cast<int>(cy + r) + 1);
  const int x_lo = std::max(0, static_cast<int>(cx - r) - 1), x_hi = std::min(img.width() - 1, static_cast<int>(cx + r) + 1);
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      int hits = 0;
      for (double oy : {0.25, 0.75})
        for (double ox : {0.25, 0.75}) hits += inside(shape, (x + ox - cx) / r, (y + oy - cy) / r) ? 1 : 0;
      if (hits == 0) continue;
      const float w = hits / 4.0f;
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = img.at(y, x, c) * (1 - w) + fg[c] * w;
    }
  }
}

void add_noise(ImageTensor &img, double sigma, std::mt19937_64 &rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<float> n(0.0f, static_cast<float>(sigma));
  for (float &v : img.data()) v = std::clamp(v + n(rng), 0.0f, 1.0f);
}

ImageTensor canvas(int size, const Rgb &bg) {
  ImageTensor img(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = bg[c];
  return img;
}

}  // namespace

ImageTensor render_shape(Shape shape, const ShapeStyle &style, std::mt19937_64 &rng) {
  require(style.size >= 8, "synthetic images must be at least 8 pixels wide");
  auto [fg, bg] = colours(rng);
  ImageTensor img = canvas(style.size, bg);
  std::uniform_real_distribution<double> rad(style.min_radius, style.max_radius);
  const double r = rad(rng) * style.size;
  std::uniform_real_distribution<double> pos(r, style.size - r);
  const double cx = pos(rng), cy = pos(rng);
  draw(img, shape, cx, cy, r, fg);
  add_noise(img, style.noise_sigma, rng);
  return img;
}

ImageTensor render_in_quadrant(Shape shape, int quadrant, int size, std::mt19937_64 &rng) {
  require(quadrant >= 0 && quadrant < 4, "quadrant must be 0..3");
  auto [fg, bg] = colours(rng);
  ImageTensor img = canvas(size, bg);
  const double half = size / 2.0;
  std::uniform_real_distribution<double> rad(0.30, 0.40);
  const double r = rad(rng) * half;
  std::uniform_real_distribution<double> jitter(-0.08 * half, 0.08 * half);
  const double cx = (quadrant % 2) * half + half / 2 + jitter(rng);
  const double cy = (quadrant / 2) * half + half / 2 + jitter(rng);
  draw(img, shape, cx, cy, r, fg);
  add_noise(img, 0.03, rng);
  return img;
}

InMemorySource shapes_dataset(std::size_t per_class, const ShapeStyle &style, std::uint64_t seed) {
  InMemorySource out;
  std::mt19937_64 rng(mix_seed(seed, 0x5A));
  for (std::size_t i = 0; i < per_class; ++i)
    for (std::size_t c = 0; c < kNumClasses; ++c)
      out.add(render_shape(static_cast<Shape>(c), style, rng), kAllClasses[c]);
  return out;
}

InMemorySource quadrant_dataset(std::size_t per_class, int size, std::uint64_t seed) {
  InMemorySource out;
  std::mt19937_64 rng(mix_seed(seed, 0x9A));
  std::uniform_int_distribution<int> quad(0, 3);
  for (std::size_t i = 0; i < per_class; ++i)
    for (std::size_t c = 0; c < kNumClasses; ++c)
      out.add(render_in_quadrant(static_cast<Shape>(c), quad(rng), size, rng), kAllClasses[c]);
  return out;
}

InMemorySource unlabeled_shapes(std::size_t count, const ShapeStyle &style, std::uint64_t seed) {
  InMemorySource out;
  std::mt19937_64 rng(mix_seed(seed, 0x0B));
  std::uniform_int_distribution<int> pick(0, static_cast<int>(kNumClasses) - 1);
  for (std::size_t i = 0; i < count; ++i) out.add(render_shape(static_cast<Shape>(pick(rng)), style, rng), std::nullopt);
  return out;
}

datakit::DatasetManifest write_shapes_corpus(const std::filesystem::path &dir, std::size_t per_class,
                                             const ShapeStyle &style, std::uint64_t seed, bool labeled) {
  InMemorySource data = shapes_dataset(per_class, style, seed);
  std::vector<datakit::ImageRecord> records;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ClassLabel label = *data.label(i);
    std::ostringstream name;
    name << name_of(label) << '/' << "img" << (i / kNumClasses) << ".png";
    write_png(data.image(i), dir / name.str());
    datakit::ImageRecord r;
    r.path = name.str();
    if (labeled) r.label = label;
    r.source = "synthetic-shapes";
    records.push_back(std::move(r));
  }
  return datakit::DatasetManifest(labeled ? "shapes" : "shapes_unlabeled", dir, std::move(records));
}

}  // namespace rashdx::synthetic
