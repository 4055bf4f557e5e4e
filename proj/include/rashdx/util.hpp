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
#ifndef RASHDX_UTIL_HPP_
#define RASHDX_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace rashdx {

std::string trim(std::string_view s);

/// splitmix64 finalizer over (seed, stream): derives independent generator
/// seeds for each (seed, draw, purpose) combination.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(seed, a), b);
}

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset);

std::string hex64(std::uint64_t v);

/// Flat `key = value` configuration text. `#` starts a comment, blank lines
/// are ignored, later keys override earlier ones.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig parse(const std::string &text);
  static KeyValueConfig load(const std::filesystem::path &path);

  bool has(const std::string &key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string &key) const;
  double get_double(const std::string &key, double fallback) const;
  long long get_int(const std::string &key, long long fallback) const;
  bool get_bool(const std::string &key, bool fallback) const;
  std::string get_string(const std::string &key, const std::string &fallback) const;
  void set(const std::string &key, const std::string &value) { values_[key] = value; }
  const std::map<std::string, std::string> &values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Local time in ISO-8601, for run records and request logs.
std::string iso_timestamp();

}  // namespace rashdx

#endif  // RASHDX_UTIL_HPP_
