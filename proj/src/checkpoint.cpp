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
#include "rashdx/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "rashdx/error.hpp"

namespace rashdx {

namespace {

constexpr char kMagic[8] = {'R', 'D', 'X', 'C', 'K', 'P', 'T', '1'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

}  // namespace

nlohmann::json to_json(const nn::EncoderSpec &spec) {
  return {{"name", spec.name},
          {"feature_dim", spec.feature_dim},
          {"stem_pool", spec.stem_pool},
          {"conv_channels", spec.conv_channels},
          {"dense_hidden", spec.dense_hidden}};
}

nn::EncoderSpec encoder_spec_from_json(const nlohmann::json &j) {
  nn::EncoderSpec s;
  s.name = j.at("name").get<std::string>();
  s.feature_dim = j.at("feature_dim").get<int>();
  s.stem_pool = j.at("stem_pool").get<int>();
  s.conv_channels = j.at("conv_channels").get<std::vector<int>>();
  s.dense_hidden = j.at("dense_hidden").get<int>();
  return s;
}

void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path) {
  nlohmann::json header;
  header["kind"] = checkpoint.kind;
  header["encoder"] = to_json(checkpoint.encoder);
  header["metadata"] = checkpoint.metadata;
  header["mlp_dims"] = checkpoint.mlp_dims;
  auto tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto &[store_name, store] : checkpoint.stores) {
    for (std::size_t i = 0; i < store.values.size(); ++i) {
      const auto &m = store.values[i];
      tensors.push_back({{"store", store_name},
                         {"name", store.names[i]},
                         {"rows", m.rows()},
                         {"cols", m.cols()},
                         {"offset", offset}});
      offset += static_cast<std::uint64_t>(m.size());
    }
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof kMagic);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char *>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto &[store_name, store] : checkpoint.stores) {
    for (const auto &m : store.values) {
      out.write(reinterpret_cast<const char *>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
    }
  }
  if (!out) throw IoError("short write: " + path.string());

  std::ofstream side(path.string() + ".json");
  if (!side) throw IoError("cannot write checkpoint sidecar for " + path.string());
  nlohmann::json meta = checkpoint.metadata;
  meta["kind"] = checkpoint.kind;
  meta["encoder"] = to_json(checkpoint.encoder);
  side << meta.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open checkpoint: " + path.string());
  char magic[8];
  std::uint64_t len = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char *>(&len), sizeof len);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0 || len > (1u << 30)) {
    throw DecodeError("not a checkpoint file: " + path.string());
  }
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw DecodeError("truncated checkpoint header: " + path.string());

  Checkpoint ck;
  try {
    auto header = nlohmann::json::parse(text);
    ck.kind = header.at("kind").get<std::string>();
    ck.encoder = encoder_spec_from_json(header.at("encoder"));
    ck.metadata = header.at("metadata");
    ck.mlp_dims = header.at("mlp_dims").get<std::map<std::string, std::vector<int>>>();
    for (const auto &t : header.at("tensors")) {
      nn::Matrix m(t.at("rows").get<Eigen::Index>(), t.at("cols").get<Eigen::Index>());
      in.read(reinterpret_cast<char *>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
      if (!in) throw DecodeError("truncated checkpoint payload: " + path.string());
      ck.stores[t.at("store").get<std::string>()].add(t.at("name").get<std::string>(), std::move(m));
    }
  } catch (const nlohmann::json::exception &e) {
    throw DecodeError("malformed checkpoint header in " + path.string() + ": " + e.what());
  }
  return ck;
}

void assign_params(nn::ParamStore &into, const nn::ParamStore &from, const std::string &what) {
  if (into.names != from.names) throw ValidationError(what + ": parameter names do not match");
  for (std::size_t i = 0; i < into.values.size(); ++i) {
    if (into.values[i].rows() != from.values[i].rows() || into.values[i].cols() != from.values[i].cols()) {
      throw ValidationError(what + ": shape mismatch for " + into.names[i]);
    }
    into.values[i] = from.values[i];
  }
}

}  // namespace rashdx
