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
#ifndef RASHDX_SOURCE_HPP_
#define RASHDX_SOURCE_HPP_

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "rashdx/datakit.hpp"
#include "rashdx/image.hpp"

namespace rashdx {

/// Random-access view over a corpus of (image, optional label) pairs, the
/// input of training and evaluation loops.
class ImageSource {
 public:
  virtual ~ImageSource() = default;
  virtual std::size_t size() const = 0;
  virtual ImageTensor image(std::size_t i) const = 0;
  virtual std::optional<ClassLabel> label(std::size_t i) const = 0;
};

class InMemorySource final : public ImageSource {
 public:
  InMemorySource() = default;
  InMemorySource(std::vector<ImageTensor> images, std::vector<std::optional<ClassLabel>> labels);

  void add(ImageTensor image, std::optional<ClassLabel> label);
  std::size_t size() const override { return images_.size(); }
  ImageTensor image(std::size_t i) const override { return images_.at(i); }
  std::optional<ClassLabel> label(std::size_t i) const override { return labels_.at(i); }

 private:
  std::vector<ImageTensor> images_;
  std::vector<std::optional<ClassLabel>> labels_;
};

/// Decodes manifest images on demand, keeping decoded images in memory
/// until `cache_bytes` is used up.
class ManifestSource final : public ImageSource {
 public:
  explicit ManifestSource(datakit::DatasetManifest manifest, std::size_t cache_bytes = std::size_t{1} << 30);

  const datakit::DatasetManifest &manifest() const { return manifest_; }
  std::size_t size() const override { return manifest_.size(); }
  ImageTensor image(std::size_t i) const override;
  std::optional<ClassLabel> label(std::size_t i) const override { return manifest_.records().at(i).label; }

 private:
  datakit::DatasetManifest manifest_;
  std::size_t cache_budget_;
  mutable std::mutex mu_;
  mutable std::vector<std::shared_ptr<const ImageTensor>> cache_;
  mutable std::size_t cached_bytes_ = 0;
};

}  // namespace rashdx

#endif  // RASHDX_SOURCE_HPP_
