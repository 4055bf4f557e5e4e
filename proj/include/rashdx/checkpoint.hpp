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
#ifndef RASHDX_CHECKPOINT_HPP_
#define RASHDX_CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "rashdx/nn.hpp"

namespace rashdx {

/// On-disk layout:
///   8 bytes   magic "RDXCKPT1"
///   8 bytes   little-endian length L of the JSON header
///   L bytes   JSON header: kind, encoder spec, metadata, tensor table
///   ...       float32 little-endian tensor payload, column-major
/// plus a sidecar `<file>.json` holding the metadata alone.
struct Checkpoint {
  std::string kind;  // "simclr" or "classifier"
  nn::EncoderSpec encoder;
  std::map<std::string, nn::ParamStore> stores;  // "encoder", "projection", "classifier"
  std::map<std::string, std::vector<int>> mlp_dims;
  nlohmann::json metadata = nlohmann::json::object();
};

void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path);
Checkpoint load_checkpoint(const std::filesystem::path &path);

nlohmann::json to_json(const nn::EncoderSpec &spec);
nn::EncoderSpec encoder_spec_from_json(const nlohmann::json &j);

/// Copies values into `into`, checking names and shapes agree.
void assign_params(nn::ParamStore &into, const nn::ParamStore &from, const std::string &what);

}  // namespace rashdx

#endif  // RASHDX_CHECKPOINT_HPP_
