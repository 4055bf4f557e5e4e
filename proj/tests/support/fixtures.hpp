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
#ifndef RASHDX_TESTS_FIXTURES_HPP_
#define RASHDX_TESTS_FIXTURES_HPP_

#include <filesystem>
#include <random>
#include <string>

#include "rashdx/datakit.hpp"
#include "rashdx/image.hpp"

namespace fixtures {

/// Labeled manifest with the given per-class counts; paths only, no files.
inline rashdx::datakit::DatasetManifest manifest_with_counts(const rashdx::datakit::ClassCounts &counts,
                                                             const std::string &name = "m") {
  std::vector<rashdx::datakit::ImageRecord> records;
  for (std::size_t c = 0; c < rashdx::kNumClasses; ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      rashdx::datakit::ImageRecord r;
      r.path = std::string(rashdx::kClassNames[c]) + "/" + std::to_string(i) + ".png";
      r.label = rashdx::kAllClasses[c];
      records.push_back(std::move(r));
    }
  }
  // Interleave so that input order is not grouped by class.
  std::mt19937_64 rng(counts[0] * 131 + counts[7]);
  std::shuffle(records.begin(), records.end(), rng);
  return rashdx::datakit::DatasetManifest(name, ".", std::move(records));
}

inline rashdx::datakit::ClassCounts random_counts(std::mt19937_64 &rng, std::size_t max_per_class) {
  std::uniform_int_distribution<std::size_t> d(0, max_per_class);
  rashdx::datakit::ClassCounts counts{};
  std::size_t total = 0;
  for (auto &c : counts) total += (c = d(rng));
  if (total == 0) counts[0] = 1;
  return counts;
}

/// Class profile of the 3100-image labeled corpus.
inline rashdx::datakit::ClassCounts data_a_counts() {
  // Bullous, Chickenpox, Eczema, Measles, Mpox, Normal, Urticaria, Vasculitis
  return {561, 107, 881, 91, 381, 293, 265, 521};
}

inline rashdx::ImageTensor random_image(int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  rashdx::ImageTensor img(h, w);
  for (float &v : img.data()) v = u(rng);
  return img;
}

/// Fresh, empty temp directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("rashdx_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures

#endif  // RASHDX_TESTS_FIXTURES_HPP_
