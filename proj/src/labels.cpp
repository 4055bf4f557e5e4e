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
#include "rashdx/labels.hpp"

#include "rashdx/error.hpp"

namespace rashdx {

std::optional<ClassLabel> parse_class(std::string_view name) {
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (kClassNames[i] == name) return kAllClasses[i];
  }
  return std::nullopt;
}

ClassLabel class_from_index(int index) {
  require(index >= 0 && index < static_cast<int>(kNumClasses),
          "class index out of range: " + std::to_string(index));
  return kAllClasses[static_cast<std::size_t>(index)];
}

std::string_view name_of(Grade g) {
  switch (g) {
    case Grade::kI: return "I";
    case Grade::kII: return "II";
    case Grade::kIII: return "III";
    case Grade::kOthers: return "Others";
  }
  return "";
}

std::string_view name_of(Stage s) { return s == Stage::kEarlier ? "earlier" : "later"; }

std::optional<Grade> parse_grade(std::string_view s) {
  if (s == "I") return Grade::kI;
  if (s == "II") return Grade::kII;
  if (s == "III") return Grade::kIII;
  // Grade IV (close-range shots) and "Others" are one partition.
  if (s == "Others" || s == "IV") return Grade::kOthers;
  return std::nullopt;
}

std::optional<Stage> parse_stage(std::string_view s) {
  if (s == "earlier") return Stage::kEarlier;
  if (s == "later") return Stage::kLater;
  return std::nullopt;
}

}  // namespace rashdx
