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
#ifndef RASHDX_IMAGE_HPP_
#define RASHDX_IMAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rashdx {

/// Network input resolution after preprocessing.
inline constexpr int kInputSize = 224;

/// RGB image with float samples in [0, 1], stored row-major, channels
/// interleaved (HWC).
class ImageTensor {
 public:
  static constexpr int kChannels = 3;

  ImageTensor() = default;
  ImageTensor(int height, int width, float fill = 0.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return height_ <= 0 || width_ <= 0; }
  std::size_t size() const { return data_.size(); }

  float &at(int y, int x, int c) { return data_[index(y, x, c)]; }
  const float &at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  /// Dimensions positive and every sample finite and within [0, 1].
  bool valid() const;

  /// Clamps every sample into [0, 1].
  void clamp();

  friend bool operator==(const ImageTensor &, const ImageTensor &) = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

/// Throws ContractError unless `image` is non-degenerate and in range.
void require_valid(const ImageTensor &image);

/// Bilinear resampling with half-pixel centres and edge clamping.
ImageTensor resize_bilinear(const ImageTensor &image, int height, int width);

/// The preprocessing contract of every classifier: bilinear resize straight
/// to 224x224, no aspect-preserving crop.
ImageTensor preprocess(const ImageTensor &image);

/// Decodes PNG or JPEG bytes. Grayscale and alpha inputs are converted to
/// RGB. Throws DecodeError on anything undecodable.
ImageTensor decode_image(std::span<const std::uint8_t> bytes);

/// Reads and decodes a file (IngestionError if unreadable, DecodeError if
/// not an image).
ImageTensor read_image(const std::filesystem::path &path);

/// 8-bit RGB PNG encoding with round-half-up quantization.
std::vector<std::uint8_t> encode_png(const ImageTensor &image);

/// Writes a PNG, creating parent directories. Throws IoError on failure.
void write_png(const ImageTensor &image, const std::filesystem::path &path);

/// Rounds to the 8-bit grid: what a PNG round trip would return.
ImageTensor quantize8(const ImageTensor &image);

}  // namespace rashdx

#endif  // RASHDX_IMAGE_HPP_
