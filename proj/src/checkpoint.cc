// Copyright 2026 The PosHashEmb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <string>

#include "poshash/embedding.h"
#include "poshash/errors.h"

namespace poshash {
namespace {

constexpr std::string_view kFormat = "poshash-scheme-checkpoint";
constexpr int kVersion = 1;

nlohmann::json hashes_to_json(const std::vector<UniversalHash>& hashes) {
  auto out = nlohmann::json::array();
  for (const auto& f : hashes) out.push_back({{"a", f.a}, {"b", f.b}, {"m", f.m}});
  return out;
}

}  // namespace

nlohmann::json checkpoint_to_json(const SchemeConfig& config,
                                  const SchemeContext& context,
                                  const EmbeddingScheme& scheme) {
  nlohmann::json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["config"] = to_json(config);
  j["num_nodes"] = context.num_nodes;
  j["seed"] = context.seed;
  j["hash_keys"] = context.hash_keys;
  if (context.hierarchy) {
    auto levels = nlohmann::json::array();
    for (std::int32_t l = 0; l < context.hierarchy->num_levels(); ++l) {
      const auto lvl = context.hierarchy->level(l);
      levels.push_back(std::vector<PartId>(lvl.begin(), lvl.end()));
    }
    j["hierarchy"] = {{"branching", context.hierarchy->branching()},
                      {"levels", std::move(levels)}};
  } else {
    j["hierarchy"] = nullptr;
  }
  j["hashes"] = hashes_to_json(scheme.hash_functions());
  auto params = nlohmann::json::array();
  for (const auto* p : scheme.parameters()) {
    const auto v = p->value.values();
    params.push_back({{"name", p->name},
                      {"rows", p->value.rows()},
                      {"cols", p->value.cols()},
                      {"values", std::vector<double>(v.begin(), v.end())}});
  }
  j["parameters"] = std::move(params);
  return j;
}

LoadedScheme checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != kFormat || j.value("version", 0) != kVersion) {
      throw DataError("not a scheme checkpoint (format/version mismatch)");
    }
    LoadedScheme out;
    out.config = scheme_config_from_json(j.at("config"), "checkpoint.config");
    out.context.num_nodes = j.at("num_nodes").get<NodeId>();
    out.context.seed = j.at("seed").get<std::uint64_t>();
    out.context.hash_keys = j.at("hash_keys").get<std::vector<std::int64_t>>();
    if (const auto& h = j.at("hierarchy"); !h.is_null()) {
      out.context.hierarchy = std::make_shared<const PartitionHierarchy>(
          h.at("branching").get<std::int64_t>(), out.context.num_nodes,
          h.at("levels").get<std::vector<std::vector<PartId>>>());
    }
    out.scheme = make_scheme(out.config, out.context);
    if (hashes_to_json(out.scheme->hash_functions()) != j.at("hashes")) {
      throw DataError("checkpoint hash parameters do not match its seed");
    }
    const auto& params = j.at("parameters");
    auto live = out.scheme->parameters();
    if (params.size() != live.size()) {
      throw DataError("checkpoint parameter list does not match the scheme");
    }
    for (std::size_t i = 0; i < live.size(); ++i) {
      const auto& src = params[i];
      auto& dst = *live[i];
      if (src.at("name").get<std::string>() != dst.name ||
          src.at("rows").get<std::size_t>() != dst.value.rows() ||
          src.at("cols").get<std::size_t>() != dst.value.cols()) {
        throw DataError("checkpoint parameter '" + dst.name +
                        "' has an unexpected name or shape");
      }
      const auto values = src.at("values").get<std::vector<double>>();
      if (values.size() != dst.value.size()) {
        throw DataError("checkpoint parameter '" + dst.name +
                        "' has the wrong number of values");
      }
      std::copy(values.begin(), values.end(), dst.value.values().begin());
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path,
                     const SchemeConfig& config, const SchemeContext& context,
                     const EmbeddingScheme& scheme) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << checkpoint_to_json(config, context, scheme).dump() << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

LoadedScheme load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace poshash
