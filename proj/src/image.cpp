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
#include "rashdx/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "rashdx/error.hpp"

namespace rashdx {

ImageTensor::ImageTensor(int height, int width, float fill) : height_(height), width_(width) {
  require(height > 0 && width > 0, "image dimensions must be positive");
  data_.assign(static_cast<std::size_t>(height) * width * kChannels, fill);
}

bool ImageTensor::valid() const {
  if (empty()) return false;
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v) && v >= 0.0f && v <= 1.0f; });
}

void ImageTensor::clamp() {
  for (float &v : data_) v = std::clamp(v, 0.0f, 1.0f);
}

void require_valid(const ImageTensor &image) {
  require(!image.empty(), "degenerate image (zero area)");
  require(image.valid(), "image samples must lie in [0, 1]");
}

ImageTensor resize_bilinear(const ImageTensor &image, int height, int width) {
  require(!image.empty(), "degenerate image (zero area)");
  if (image.height() == height && image.width() == width) return image;
  ImageTensor out(height, width);
  const float sy = static_cast<float>(image.height()) / height;
  const float sx = static_cast<float>(image.width()) / width;
  const int max_y = image.height() - 1;
  const int max_x = image.width() - 1;

  std::vector<int> x0(width), x1(width);
  std::vector<float> fx(width);
  for (int x = 0; x < width; ++x) {
    float src = std::max((x + 0.5f) * sx - 0.5f, 0.0f);
    int lo = std::min(static_cast<int>(src), max_x);
    x0[x] = lo;
    x1[x] = std::min(lo + 1, max_x);
    fx[x] = src - lo;
  }
  for (int y = 0; y < height; ++y) {
    float src = std::max((y + 0.5f) * sy - 0.5f, 0.0f);
    int y0 = std::min(static_cast<int>(src), max_y);
    int y1 = std::min(y0 + 1, max_y);
    float fy = src - y0;
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < ImageTensor::kChannels; ++c) {
        float top = image.at(y0, x0[x], c) * (1.0f - fx[x]) + image.at(y0, x1[x], c) * fx[x];
        float bottom = image.at(y1, x0[x], c) * (1.0f - fx[x]) + image.at(y1, x1[x], c) * fx[x];
        out.at(y, x, c) = top * (1.0f - fy) + bottom * fy;
      }
    }
  }
  return out;
}

ImageTensor preprocess(const ImageTensor &image) {
  require_valid(image);
  return resize_bilinear(image, kInputSize, kInputSize);
}

ImageTensor decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw DecodeError("empty image payload");
  cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t *>(bytes.data()));
  cv::Mat bgr;
  try {
    bgr = cv::imdecode(raw, cv::IMREAD_COLOR);
  } catch (const cv::Exception &e) {
    throw DecodeError(std::string("image decoder failed: ") + e.what());
  }
  if (bgr.empty() || bgr.rows <= 0 || bgr.cols <= 0) {
    throw DecodeError("payload is not a decodable PNG or JPEG image");
  }
  ImageTensor out(bgr.rows, bgr.cols);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto *row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      out.at(y, x, 0) = row[x][2] / 255.0f;
      out.at(y, x, 1) = row[x][1] / 255.0f;
      out.at(y, x, 2) = row[x][0] / 255.0f;
    }
  }
  return out;
}

ImageTensor read_image(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open image: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const DecodeError &e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

namespace {

std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v * 255.0f + 0.5f), 0.0f, 255.0f));
}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageTensor &image) {
  require(!image.empty(), "cannot encode an empty image");
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto *row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width(); ++x) {
      row[x] = cv::Vec3b(to_byte(image.at(y, x, 2)), to_byte(image.at(y, x, 1)), to_byte(image.at(y, x, 0)));
    }
  }
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", bgr, out)) throw IoError("PNG encoding failed");
  return out;
}

void write_png(const ImageTensor &image, const std::filesystem::path &path) {
  auto bytes = encode_png(image);
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image: " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write: " + path.string());
}

ImageTensor quantize8(const ImageTensor &image) {
  ImageTensor out = image;
  for (float &v : out.data()) v = to_byte(v) / 255.0f;
  return out;
}

}  // namespace rashdx
