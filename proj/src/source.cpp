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
#include "rashdx/source.hpp"

#include "rashdx/error.hpp"

namespace rashdx {

InMemorySource::InMemorySource(std::vector<ImageTensor> images, std::vector<std::optional<ClassLabel>> labels)
    : images_(std::move(images)), labels_(std::move(labels)) {
  require(images_.size() == labels_.size(), "one label slot per image");
}

void InMemorySource::add(ImageTensor image, std::optional<ClassLabel> label) {
  images_.push_back(std::move(image));
  labels_.push_back(label);
}

ManifestSource::ManifestSource(datakit::DatasetManifest manifest, std::size_t cache_bytes)
    : manifest_(std::move(manifest)), cache_budget_(cache_bytes), cache_(manifest_.size()) {}

ImageTensor ManifestSource::image(std::size_t i) const {
  {
    std::lock_guard lock(mu_);
    if (auto hit = cache_.at(i)) return *hit;
  }
  auto img = std::make_shared<const ImageTensor>(read_image(manifest_.resolve(manifest_.records()[i])));
  std::lock_guard lock(mu_);
  const std::size_t bytes = img->size() * sizeof(float);
  if (!cache_[i] && cached_bytes_ + bytes <= cache_budget_) {
    cache_[i] = img;
    cached_bytes_ += bytes;
  }
  return *img;
}

}  // namespace rashdx
