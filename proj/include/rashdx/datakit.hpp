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
#ifndef RASHDX_DATAKIT_HPP_
#define RASHDX_DATAKIT_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rashdx/labels.hpp"

namespace rashdx::datakit {

struct ImageRecord {
  std::string path;  // relative to the owning manifest's base directory
  std::optional<ClassLabel> label;
  std::optional<Grade> grade;  // Mpox only
  std::optional<Stage> stage;  // Mpox only
  std::string source;

  friend bool operator==(const ImageRecord &, const ImageRecord &) = default;
};

using ClassCounts = std::array<std::size_t, kNumClasses>;

/// An ordered, validated list of image records. Immutable after
/// construction; every mutation returns a new manifest.
class DatasetManifest {
 public:
  DatasetManifest() = default;

  /// Validates record invariants (non-empty paths, grade/stage only on Mpox,
  /// unique paths). Throws ValidationError.
  DatasetManifest(std::string name, std::filesystem::path base_dir, std::vector<ImageRecord> records);

  const std::string &name() const { return name_; }
  const std::filesystem::path &base_dir() const { return base_dir_; }
  const std::vector<ImageRecord> &records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// True iff every record carries a label (vacuously true when empty).
  bool labeled() const { return labeled_; }

  std::filesystem::path resolve(const ImageRecord &record) const { return base_dir_ / record.path; }

 private:
  std::string name_;
  std::filesystem::path base_dir_;
  std::vector<ImageRecord> records_;
  bool labeled_ = true;
};

/// Header line of the CSV manifest format.
inline constexpr const char *kManifestHeader = "path,label,grade,stage,source";

/// Parses manifest CSV text. Relative paths resolve against `base_dir`. When
/// `check_files` is set every referenced file must exist.
DatasetManifest parse_manifest(const std::string &text, const std::string &name,
                               const std::filesystem::path &base_dir, bool check_files);

/// Loads a manifest file; paths resolve against the file's directory.
DatasetManifest load_manifest(const std::filesystem::path &path);

/// Serializes with paths re-expressed relative to `manifest_dir`.
std::string format_manifest(const DatasetManifest &manifest, const std::filesystem::path &manifest_dir);

/// Writes the manifest so that load_manifest(path) reproduces it.
void save_manifest(const DatasetManifest &manifest, const std::filesystem::path &path);

/// Per-class record counts; classes absent from the manifest count zero.
ClassCounts class_distribution(const DatasetManifest &manifest);

struct SplitResult {
  DatasetManifest train;
  DatasetManifest test;
};

/// Per-class randomized split. The total train size is
/// round(fraction * size); per class the floor of fraction * count goes to
/// train and the leftover seats are handed out by largest fractional
/// remainder (lowest class index on ties). Record order within each output
/// follows the input.
SplitResult stratified_split(const DatasetManifest &manifest, double train_fraction, std::uint64_t seed);

/// Builds a labeled manifest from `root/<ClassName>/*.{png,jpg,jpeg}`, or an
/// unlabeled one over every image below `root` when `labeled` is false.
/// Paths are sorted for determinism.
DatasetManifest scan_image_folder(const std::filesystem::path &root, bool labeled, const std::string &name);

/// Stable 64-bit FNV-1a digest over paths and labels, used to identify the
/// corpus a checkpoint was trained on.
std::uint64_t fingerprint(const DatasetManifest &manifest);

}  // namespace rashdx::datakit

#endif  // RASHDX_DATAKIT_HPP_
