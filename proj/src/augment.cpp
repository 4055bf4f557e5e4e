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
#include "rashdx/augment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rashdx/error.hpp"

namespace rashdx::augment {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 9> kOpNames = {{
    {OpKind::kGaussianNoise, "GaussianNoise"},
    {OpKind::kCropAndResize, "CropAndResize"},
    {OpKind::kAffine, "Affine"},
    {OpKind::kCutout, "Cutout"},
    {OpKind::kFlipHorizontal, "FlipHorizontal"},
    {OpKind::kFlipVertical, "FlipVertical"},
    {OpKind::kGammaContrast, "GammaContrast"},
    {OpKind::kGaussianBlur, "GaussianBlur"},
    {OpKind::kColorJitter, "ColorJitter"},
}};

double uniform(std::mt19937_64 &rng, Range r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

// Bilinear read of all three channels with edge replication.
void sample(const ImageTensor &img, float y, float x, float *dst) {
  const int max_y = img.height() - 1, max_x = img.width() - 1;
  y = std::clamp(y, 0.0f, static_cast<float>(max_y));
  x = std::clamp(x, 0.0f, static_cast<float>(max_x));
  const int y0 = static_cast<int>(y), x0 = static_cast<int>(x);
  const int y1 = std::min(y0 + 1, max_y), x1 = std::min(x0 + 1, max_x);
  const float fy = y - y0, fx = x - x0;
  const float *p00 = &img.at(y0, x0, 0), *p01 = &img.at(y0, x1, 0);
  const float *p10 = &img.at(y1, x0, 0), *p11 = &img.at(y1, x1, 0);
  for (int c = 0; c < 3; ++c) {
    const float top = p00[c] * (1 - fx) + p01[c] * fx;
    const float bottom = p10[c] * (1 - fx) + p11[c] * fx;
    dst[c] = top * (1 - fy) + bottom * fy;
  }
}

ImageTensor gaussian_noise(const ImageTensor &img, double sigma, std::mt19937_64 &rng) {
  ImageTensor out = img;
  std::normal_distribution<float> noise(0.0f, static_cast<float>(sigma));
  for (float &v : out.data()) v = std::clamp(v + noise(rng), 0.0f, 1.0f);
  return out;
}

ImageTensor crop_and_resize(const ImageTensor &img, const AugmentParams &p, std::mt19937_64 &rng, int out_h,
                            int out_w) {
  const double area = static_cast<double>(img.height()) * img.width();
  double scale = uniform(rng, p.crop_scale);
  double log_lo = std::log(p.crop_aspect.lo), log_hi = std::log(p.crop_aspect.hi);
  double aspect = std::exp(uniform(rng, {log_lo, log_hi}));
  int cw = std::clamp(static_cast<int>(std::lround(std::sqrt(scale * area * aspect))), 1, img.width());
  int ch = std::clamp(static_cast<int>(std::lround(std::sqrt(scale * area / aspect))), 1, img.height());
  int y0 = std::uniform_int_distribution<int>(0, img.height() - ch)(rng);
  int x0 = std::uniform_int_distribution<int>(0, img.width() - cw)(rng);

  // Source coordinates per output column are shared by every row.
  ImageTensor out(out_h, out_w);
  const float sy = static_cast<float>(ch) / out_h, sx = static_cast<float>(cw) / out_w;
  std::vector<int> xa(out_w), xb(out_w);
  std::vector<float> fx(out_w);
  for (int x = 0; x < out_w; ++x) {
    float src = std::min(x0 + std::max((x + 0.5f) * sx - 0.5f, 0.0f), static_cast<float>(x0 + cw - 1));
    xa[x] = static_cast<int>(src);
    xb[x] = std::min(xa[x] + 1, img.width() - 1);
    fx[x] = src - xa[x];
  }
  for (int y = 0; y < out_h; ++y) {
    float src_y = std::min(y0 + std::max((y + 0.5f) * sy - 0.5f, 0.0f), static_cast<float>(y0 + ch - 1));
    const int ya = static_cast<int>(src_y), yb = std::min(ya + 1, img.height() - 1);
    const float fy = src_y - ya;
    for (int x = 0; x < out_w; ++x) {
      const float *p00 = &img.at(ya, xa[x], 0), *p01 = &img.at(ya, xb[x], 0);
      const float *p10 = &img.at(yb, xa[x], 0), *p11 = &img.at(yb, xb[x], 0);
      float *dst = &out.at(y, x, 0);
      for (int c = 0; c < 3; ++c) {
        const float top = p00[c] * (1 - fx[x]) + p01[c] * fx[x];
        const float bottom = p10[c] * (1 - fx[x]) + p11[c] * fx[x];
        dst[c] = top * (1 - fy) + bottom * fy;
      }
    }
  }
  return out;
}

ImageTensor affine(const ImageTensor &img, const AugmentParams &p, std::mt19937_64 &rng) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  double theta = uniform(rng, p.rotation_deg) * kDeg;
  double tx = uniform(rng, {-p.max_translate, p.max_translate}) * img.width();
  double ty = uniform(rng, {-p.max_translate, p.max_translate}) * img.height();
  double shear = uniform(rng, {-p.max_shear_deg, p.max_shear_deg}) * kDeg;

  // Forward map about the centre: q = c + t + R * S * (p - c), S = x-shear.
  const double k = std::tan(shear);
  const double cos_t = std::cos(theta), sin_t = std::sin(theta);
  const double a = cos_t, b = cos_t * k - sin_t, c = sin_t, d = sin_t * k + cos_t;
  const double det = a * d - b * c;
  const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
  const double cx = (img.width() - 1) / 2.0, cy = (img.height() - 1) / 2.0;

  ImageTensor out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double qx = x - cx - tx, qy = y - cy - ty;
      auto src_x = static_cast<float>(ia * qx + ib * qy + cx);
      auto src_y = static_cast<float>(ic * qx + id * qy + cy);
      sample(img, src_y, src_x, &out.at(y, x, 0));
    }
  }
  return out;
}

ImageTensor cutout(const ImageTensor &img, const AugmentParams &p, std::mt19937_64 &rng) {
  ImageTensor out = img;
  std::array<double, 3> mean{};
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) mean[c] += img.at(y, x, c);
  const double n = static_cast<double>(img.height()) * img.width();
  for (double &m : mean) m /= n;

  int side = static_cast<int>(std::lround(uniform(rng, p.cutout_fraction) * std::min(img.height(), img.width())));
  side = std::clamp(side, 1, std::min(img.height(), img.width()));
  int y0 = std::uniform_int_distribution<int>(0, img.height() - side)(rng);
  int x0 = std::uniform_int_distribution<int>(0, img.width() - side)(rng);
  for (int y = y0; y < y0 + side; ++y)
    for (int x = x0; x < x0 + side; ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = static_cast<float>(mean[c]);
  return out;
}

ImageTensor flip(const ImageTensor &img, bool horizontal) {
  ImageTensor out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      int sy = horizontal ? y : img.height() - 1 - y;
      int sx = horizontal ? img.width() - 1 - x : x;
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(sy, sx, c);
    }
  return out;
}

ImageTensor gamma_contrast(const ImageTensor &img, double gamma) {
  ImageTensor out = img;
  const auto g = static_cast<float>(gamma);
  for (float &v : out.data()) v = std::clamp(std::pow(v, g), 0.0f, 1.0f);
  return out;
}

ImageTensor gaussian_blur(const ImageTensor &img, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = static_cast<float>(std::exp(-(i * i) / (2.0 * sigma * sigma)));
    sum += kernel[i + radius];
  }
  for (float &k : kernel) k = static_cast<float>(k / sum);

  const int h = img.height(), w = img.width();
  ImageTensor tmp(h, w), out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        float acc = 0.0f;
        for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * img.at(y, std::clamp(x + i, 0, w - 1), c);
        tmp.at(y, x, c) = acc;
      }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        float acc = 0.0f;
        for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.at(std::clamp(y + i, 0, h - 1), x, c);
        out.at(y, x, c) = std::clamp(acc, 0.0f, 1.0f);
      }
  return out;
}

float luma(float r, float g, float b) { return 0.299f * r + 0.587f * g + 0.114f * b; }

// Rotation by `turns` of a full circle about the achromatic (1,1,1) axis:
// shifts hue while leaving grey pixels fixed. Rodrigues' formula.
std::array<float, 9> hue_rotation(double turns) {
  const double theta = 2.0 * std::numbers::pi * turns;
  const double c = std::cos(theta), s = std::sin(theta), k = 1.0 / std::sqrt(3.0);
  const double t = (1.0 - c) / 3.0;
  const auto f = [](double v) { return static_cast<float>(v); };
  return {f(c + t), f(t - k * s), f(t + k * s),
          f(t + k * s), f(c + t), f(t - k * s),
          f(t - k * s), f(t + k * s), f(c + t)};
}

// Brightness, contrast, saturation, hue, in that order, clamping after each.
ImageTensor color_jitter(const ImageTensor &img, const AugmentParams &p, std::mt19937_64 &rng) {
  const auto bright = static_cast<float>(uniform(rng, p.brightness));
  const auto contrast = static_cast<float>(uniform(rng, p.contrast));
  const auto sat = static_cast<float>(uniform(rng, p.saturation));
  const double hue = uniform(rng, p.hue_shift);
  const auto rot = hue_rotation(hue);

  ImageTensor out = img;
  auto px = out.data();
  const std::size_t n = px.size() / 3;
  double mean_luma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    float *v = &px[3 * i];
    for (int c = 0; c < 3; ++c) v[c] = std::clamp(v[c] * bright, 0.0f, 1.0f);
    mean_luma += luma(v[0], v[1], v[2]);
  }
  const auto m = static_cast<float>(mean_luma / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    float *v = &px[3 * i];
    for (int c = 0; c < 3; ++c) v[c] = std::clamp((v[c] - m) * contrast + m, 0.0f, 1.0f);
    const float gray = luma(v[0], v[1], v[2]);
    for (int c = 0; c < 3; ++c) v[c] = std::clamp((v[c] - gray) * sat + gray, 0.0f, 1.0f);
    if (hue != 0.0) {
      const float r = v[0], g = v[1], b = v[2];
      v[0] = std::clamp(rot[0] * r + rot[1] * g + rot[2] * b, 0.0f, 1.0f);
      v[1] = std::clamp(rot[3] * r + rot[4] * g + rot[5] * b, 0.0f, 1.0f);
      v[2] = std::clamp(rot[6] * r + rot[7] * g + rot[8] * b, 0.0f, 1.0f);
    }
  }
  return out;
}

void check_range(const Range &r, double lo, double hi, const char *name) {
  if (!(r.lo <= r.hi) || r.lo < lo || r.hi > hi) {
    std::ostringstream msg;
    msg << "augmentation range " << name << " = [" << r.lo << ", " << r.hi << "] outside [" << lo << ", " << hi << "]";
    throw ValidationError(msg.str());
  }
}

}  // namespace

std::string_view name_of(OpKind kind) {
  for (const auto &[k, n] : kOpNames)
    if (k == kind) return n;
  return "";
}

std::optional<OpKind> parse_op(std::string_view name) {
  for (const auto &[k, n] : kOpNames)
    if (n == name) return k;
  return std::nullopt;
}

void AugmentParams::validate() const {
  check_range(noise_sigma, 0.0, 1.0, "noise_sigma");
  check_range(crop_scale, 1e-3, 1.0, "crop_scale");
  check_range(crop_aspect, 1e-2, 1e2, "crop_aspect");
  check_range(rotation_deg, -180.0, 180.0, "rotation_deg");
  check_range({0.0, max_translate}, 0.0, 0.5, "max_translate");
  check_range({0.0, max_shear_deg}, 0.0, 45.0, "max_shear_deg");
  check_range(cutout_fraction, 0.0, 1.0, "cutout_fraction");
  check_range(gamma, 1e-2, 10.0, "gamma");
  check_range(blur_sigma, 1e-2, 20.0, "blur_sigma");
  check_range(brightness, 0.0, 10.0, "brightness");
  check_range(contrast, 0.0, 10.0, "contrast");
  check_range(saturation, 0.0, 10.0, "saturation");
  check_range(hue_shift, -0.5, 0.5, "hue_shift");
}

namespace {

struct RangeKey {
  const char *key;
  Range AugmentParams::*field;
};

constexpr std::array<RangeKey, 11> kRangeKeys = {{
    {"noise_sigma", &AugmentParams::noise_sigma},
    {"crop_scale", &AugmentParams::crop_scale},
    {"crop_aspect", &AugmentParams::crop_aspect},
    {"rotation_deg", &AugmentParams::rotation_deg},
    {"cutout_fraction", &AugmentParams::cutout_fraction},
    {"gamma", &AugmentParams::gamma},
    {"blur_sigma", &AugmentParams::blur_sigma},
    {"brightness", &AugmentParams::brightness},
    {"contrast", &AugmentParams::contrast},
    {"saturation", &AugmentParams::saturation},
    {"hue_shift", &AugmentParams::hue_shift},
}};

}  // namespace

AugmentParams AugmentParams::from_config(const KeyValueConfig &config, const AugmentParams &base) {
  AugmentParams p = base;
  for (const auto &rk : kRangeKeys) {
    Range &r = p.*(rk.field);
    r.lo = config.get_double(std::string("augment.") + rk.key + "_min", r.lo);
    r.hi = config.get_double(std::string("augment.") + rk.key + "_max", r.hi);
  }
  p.max_translate = config.get_double("augment.max_translate", p.max_translate);
  p.max_shear_deg = config.get_double("augment.max_shear_deg", p.max_shear_deg);
  p.validate();
  return p;
}

std::string AugmentParams::to_config_text() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto &rk : kRangeKeys) {
    const Range &r = this->*(rk.field);
    out << "augment." << rk.key << "_min = " << r.lo << '\n';
    out << "augment." << rk.key << "_max = " << r.hi << '\n';
  }
  out << "augment.max_translate = " << max_translate << '\n';
  out << "augment.max_shear_deg = " << max_shear_deg << '\n';
  return out.str();
}

AugmentParams simclr_view_params() {
  AugmentParams p;
  p.hue_shift = {-0.5, 0.5};
  p.saturation = {0.2, 1.8};
  return p;
}

AugmentationPolicy expansion_policy(std::uint64_t seed) {
  AugmentationPolicy p;
  p.ops = {OpKind::kGaussianNoise,  OpKind::kCropAndResize, OpKind::kAffine,        OpKind::kCutout,
           OpKind::kFlipHorizontal, OpKind::kFlipVertical,  OpKind::kGammaContrast, OpKind::kGaussianBlur};
  p.seed = seed;
  return p;
}

ImageTensor apply_op(const ImageTensor &image, OpKind kind, const AugmentParams &params, std::mt19937_64 &rng,
                     int crop_output) {
  switch (kind) {
    case OpKind::kGaussianNoise: return gaussian_noise(image, uniform(rng, params.noise_sigma), rng);
    case OpKind::kCropAndResize:
      return crop_and_resize(image, params, rng, crop_output > 0 ? crop_output : image.height(),
                             crop_output > 0 ? crop_output : image.width());
    case OpKind::kAffine: return affine(image, params, rng);
    case OpKind::kCutout: return cutout(image, params, rng);
    case OpKind::kFlipHorizontal: return flip(image, true);
    case OpKind::kFlipVertical: return flip(image, false);
    case OpKind::kGammaContrast: return gamma_contrast(image, uniform(rng, params.gamma));
    case OpKind::kGaussianBlur: return gaussian_blur(image, uniform(rng, params.blur_sigma));
    case OpKind::kColorJitter: return color_jitter(image, params, rng);
  }
  throw ContractError("unknown augmentation op");
}

ImageTensor apply_policy(const ImageTensor &image, const AugmentationPolicy &policy, std::uint64_t draw) {
  require_valid(image);
  require(policy.per_op_probability >= 0.0 && policy.per_op_probability <= 1.0,
          "per_op_probability must lie in [0, 1]");
  std::mt19937_64 rng(mix_seed(policy.seed, draw));
  std::vector<OpKind> chosen;
  std::bernoulli_distribution keep(policy.per_op_probability);
  for (OpKind op : policy.ops)
    if (keep(rng)) chosen.push_back(op);
  if (policy.shuffle_order) std::shuffle(chosen.begin(), chosen.end(), rng);

  ImageTensor out = image;
  for (OpKind op : chosen) out = apply_op(out, op, policy.params, rng);
  if (policy.output_size > 0) out = resize_bilinear(out, policy.output_size, policy.output_size);
  return out;
}

std::pair<ImageTensor, ImageTensor> simclr_view_pair(const ImageTensor &image, std::uint64_t seed,
                                                     std::uint64_t draw, const AugmentParams &params) {
  require_valid(image);
  auto view = [&](std::uint64_t which) {
    std::mt19937_64 rng(mix_seed(seed, draw, which));
    ImageTensor v = apply_op(image, OpKind::kCropAndResize, params, rng, kInputSize);
    return apply_op(v, OpKind::kColorJitter, params, rng);
  };
  return {view(0), view(1)};
}

std::vector<ClassLabel> default_scarce_classes() {
  return {ClassLabel::kMpox, ClassLabel::kChickenpox, ClassLabel::kMeasles, ClassLabel::kNormal,
          ClassLabel::kUrticaria};
}

ExpansionTargets default_expansion_targets(const datakit::ClassCounts &counts, const std::vector<ClassLabel> &classes,
                                           std::size_t total) {
  std::array<bool, kNumClasses> listed{};
  for (ClassLabel c : classes) listed[static_cast<std::size_t>(index_of(c))] = true;
  std::size_t fixed = 0, current = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    current += counts[i];
    if (!listed[i]) fixed += counts[i];
  }
  require(total >= current, "total target " + std::to_string(total) + " is below the current size " +
                                std::to_string(current));
  require(!classes.empty() || total == current, "no classes listed to expand");
  const std::size_t budget = total - fixed;

  auto filled = [&](std::size_t level) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < kNumClasses; ++i)
      if (listed[i]) s += std::max(counts[i], level);
    return s;
  };
  // Largest level whose fill does not exceed the budget.
  std::size_t lo = 0, hi = budget;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (filled(mid) <= budget) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  ExpansionTargets targets;
  std::size_t leftover = budget - filled(lo);
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (!listed[i]) continue;
    std::size_t t = std::max(counts[i], lo);
    if (leftover > 0 && counts[i] <= lo) {
      ++t;
      --leftover;
    }
    targets[kAllClasses[i]] = t;
  }
  require(leftover == 0, "total target cannot be reached by expanding the listed classes");
  return targets;
}

datakit::DatasetManifest expand_scarce_classes(const datakit::DatasetManifest &manifest,
                                               const ExpansionTargets &targets, const AugmentationPolicy &policy,
                                               const fs::path &output_dir) {
  require(manifest.labeled(), "expand_scarce_classes requires a labeled manifest");
  policy.params.validate();
  auto counts = datakit::class_distribution(manifest);
  for (const auto &[label, target] : targets) {
    auto have = counts[static_cast<std::size_t>(index_of(label))];
    require(target >= have, "target for " + std::string(name_of(label)) + " (" + std::to_string(target) +
                                ") is below its current count (" + std::to_string(have) + ")");
    require(have > 0 || target == 0, "cannot expand " + std::string(name_of(label)) + ": no originals");
  }

  std::vector<datakit::ImageRecord> records = manifest.records();
  std::uint64_t draw = 0;
  for (ClassLabel label : kAllClasses) {
    auto it = targets.find(label);
    if (it == targets.end()) continue;
    const std::size_t have = counts[static_cast<std::size_t>(index_of(label))];
    if (it->second == have) continue;

    std::vector<const datakit::ImageRecord *> originals;
    for (const auto &r : manifest.records())
      if (r.label == label) originals.push_back(&r);

    const fs::path class_dir = output_dir / std::string(name_of(label));
    std::error_code ec;
    fs::create_directories(class_dir, ec);
    if (ec) throw IoError("cannot create " + class_dir.string() + ": " + ec.message());

    for (std::size_t j = 0; j < it->second - have; ++j, ++draw) {
      const auto &orig = *originals[j % originals.size()];
      ImageTensor img = read_image(manifest.resolve(orig));
      ImageTensor aug = apply_policy(img, policy, draw);
      fs::path file = class_dir / (fs::path(orig.path).stem().string() + "__aug" + std::to_string(draw) + ".png");
      write_png(aug, file);
      datakit::ImageRecord rec = orig;
      rec.path = fs::absolute(file).lexically_normal().lexically_proximate(
                                       fs::absolute(manifest.base_dir()).lexically_normal())
                     .generic_string();
      rec.source = "augmented:" + orig.path;
      records.push_back(std::move(rec));
    }
  }
  return datakit::DatasetManifest(manifest.name() + "_expanded", manifest.base_dir(), std::move(records));
}

}  // namespace rashdx::augment
