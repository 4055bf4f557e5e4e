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
#ifndef RASHDX_LABELS_HPP_
#define RASHDX_LABELS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace rashdx {

/// The eight skin classes. Enumerator values are the fixed output indices of
/// every classifier and every confusion matrix (alphabetical order).
enum class ClassLabel : int {
  kBullous = 0,
  kChickenpox = 1,
  kEczema = 2,
  kMeasles = 3,
  kMpox = 4,
  kNormal = 5,
  kUrticaria = 6,
  kVasculitis = 7,
};

inline constexpr std::size_t kNumClasses = 8;

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "Bullous", "Chickenpox", "Eczema", "Measles", "Mpox", "Normal", "Urticaria", "Vasculitis"};

inline constexpr std::array<ClassLabel, kNumClasses> kAllClasses = {
    ClassLabel::kBullous, ClassLabel::kChickenpox, ClassLabel::kEczema,    ClassLabel::kMeasles,
    ClassLabel::kMpox,    ClassLabel::kNormal,     ClassLabel::kUrticaria, ClassLabel::kVasculitis};

constexpr int index_of(ClassLabel c) { return static_cast<int>(c); }
constexpr std::string_view name_of(ClassLabel c) { return kClassNames[static_cast<std::size_t>(c)]; }

/// Case-sensitive lookup; nullopt for anything outside the roster.
std::optional<ClassLabel> parse_class(std::string_view name);

/// Throws ContractError for indices outside [0, 8).
ClassLabel class_from_index(int index);

/// Body-site grade of an Mpox image. Grade IV images are recorded as kOthers.
enum class Grade { kI, kII, kIII, kOthers };
enum class Stage { kEarlier, kLater };

std::string_view name_of(Grade g);
std::string_view name_of(Stage s);
std::optional<Grade> parse_grade(std::string_view s);
std::optional<Stage> parse_stage(std::string_view s);

}  // namespace rashdx

#endif  // RASHDX_LABELS_HPP_
