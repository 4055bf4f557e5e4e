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
#ifndef RASHDX_CLI_HPP_
#define RASHDX_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace rashdx::cli {

inline constexpr const char *kVersion = "0.1.0";

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // an inner module raised an error
inline constexpr int kExitUsage = 2;    // unknown subcommand, bad or missing flag

/// Entry point of the `rashdx` binary. `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int run(int argc, const char *const *argv);

}  // namespace rashdx::cli

#endif  // RASHDX_CLI_HPP_
