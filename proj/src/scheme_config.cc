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

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "poshash/embedding.h"
#include "poshash/errors.h"

namespace poshash {
namespace {

constexpr std::array<std::pair<SchemeKind, std::string_view>, 10> kKindNames{{
    {SchemeKind::kFullEmb, "FullEmb"},
    {SchemeKind::kHashTrick, "HashTrick"},
    {SchemeKind::kBloom, "Bloom"},
    {SchemeKind::kHashEmb, "HashEmb"},
    {SchemeKind::kDhe, "DHE"},
    {SchemeKind::kPosEmb, "PosEmb"},
    {SchemeKind::kPosFullEmb, "PosFullEmb"},
    {SchemeKind::kPosHashEmbIntra, "PosHashEmbIntra"},
    {SchemeKind::kPosHashEmbInter, "PosHashEmbInter"},
    {SchemeKind::kRandomPart, "RandomPart"},
}};

[[noreturn]] void fail(std::string_view path, std::string_view field,
                       const std::string& message) {
  throw ConfigError(std::string(path) + "." + std::string(field) + ": " +
                    message);
}

bool uses_partitions(SchemeKind kind) {
  return needs_hierarchy(kind) || kind == SchemeKind::kRandomPart;
}

bool uses_node_hashes(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kBloom:
    case SchemeKind::kHashEmb:
    case SchemeKind::kPosHashEmbIntra:
    case SchemeKind::kPosHashEmbInter:
      return true;
    default:
      return false;
  }
}

template <typename T>
T read_field(const nlohmann::json& j, std::string_view path,
             std::string_view field, T fallback) {
  const auto it = j.find(std::string(field));
  if (it == j.end()) return fallback;
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) fail(path, field, "expected an integer");
    } else {
      if (!it->is_number()) fail(path, field, "expected a number");
    }
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(path, field, e.what());
  }
}

}  // namespace

std::string_view to_string(SchemeKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  std::string known;
  for (const auto& [k, n] : kKindNames) {
    known += known.empty() ? "" : ", ";
    known += n;
  }
  throw ConfigError("unknown scheme kind '" + std::string(name) +
                    "' (known: " + known + ")");
}

bool needs_hierarchy(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kPosEmb:
    case SchemeKind::kPosFullEmb:
    case SchemeKind::kPosHashEmbIntra:
    case SchemeKind::kPosHashEmbInter:
      return true;
    default:
      return false;
  }
}

void SchemeConfig::validate(std::string_view path) const {
  if (dim < 1) fail(path, "dim", "must be positive");
  const bool bucketed = kind == SchemeKind::kHashTrick ||
                        kind == SchemeKind::kBloom ||
                        kind == SchemeKind::kHashEmb;
  if (bucketed && buckets < 1) fail(path, "buckets", "must be positive");
  if (uses_node_hashes(kind) && num_hashes < 1) {
    fail(path, "hashes", "must be positive");
  }
  if (uses_partitions(kind)) {
    if (k < 0) fail(path, "k", "must be non-negative");
    if (k == 0 && !(alpha > 0.0 && alpha < 1.0)) {
      fail(path, "alpha", "must lie in (0, 1)");
    }
    if (needs_hierarchy(kind) && k == 1) {
      fail(path, "k", "position schemes need k >= 2");
    }
  }
  if (needs_hierarchy(kind) && levels < 1) {
    fail(path, "levels", "must be at least 1");
  }
  if (!std::isfinite(lambda)) fail(path, "lambda", "must be finite");
  if (c < 0) fail(path, "c", "must be non-negative");
  if (b < 0) fail(path, "b", "must be non-negative");
  if (kind == SchemeKind::kDhe) {
    if (dhe.encoding_width < 1) fail(path, "dhe.encoding_width", "must be positive");
    if (dhe.hidden_layers < 0) fail(path, "dhe.hidden_layers", "must be >= 0");
    if (dhe.hidden_layers > 0 && dhe.hidden_width < 1) {
      fail(path, "dhe.hidden_width", "must be positive");
    }
    if (dhe.buckets < 2) fail(path, "dhe.buckets", "must be at least 2");
  }
}

nlohmann::json to_json(const SchemeConfig& config) {
  return {
      {"kind", to_string(config.kind)},
      {"dim", config.dim},
      {"buckets", config.buckets},
      {"hashes", config.num_hashes},
      {"alpha", config.alpha},
      {"k", config.k},
      {"levels", config.levels},
      {"lambda", config.lambda},
      {"c", config.c},
      {"b", config.b},
      {"dhe",
       {{"encoding_width", config.dhe.encoding_width},
        {"hidden_layers", config.dhe.hidden_layers},
        {"hidden_width", config.dhe.hidden_width},
        {"buckets", config.dhe.buckets}}},
  };
}

SchemeConfig scheme_config_from_json(const nlohmann::json& j,
                                     std::string_view path) {
  if (!j.is_object()) throw ConfigError(std::string(path) + ": expected an object");
  const auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) {
    fail(path, "kind", "required string field");
  }
  SchemeConfig c;
  try {
    c.kind = parse_scheme_kind(kind_it->get<std::string>());
  } catch (const ConfigError& e) {
    fail(path, "kind", e.what());
  }
  c.dim = read_field(j, path, "dim", c.dim);
  c.buckets = read_field(j, path, "buckets", c.buckets);
  c.num_hashes = read_field(j, path, "hashes", c.num_hashes);
  c.alpha = read_field(j, path, "alpha", c.alpha);
  c.k = read_field(j, path, "k", c.k);
  c.levels = read_field(j, path, "levels", c.levels);
  c.lambda = read_field(j, path, "lambda", c.lambda);
  c.c = read_field(j, path, "c", c.c);
  c.b = read_field(j, path, "b", c.b);
  if (const auto it = j.find("dhe"); it != j.end()) {
    const std::string sub = std::string(path) + ".dhe";
    if (!it->is_object()) throw ConfigError(sub + ": expected an object");
    c.dhe.encoding_width =
        read_field(*it, sub, "encoding_width", c.dhe.encoding_width);
    c.dhe.hidden_layers = read_field(*it, sub, "hidden_layers", c.dhe.hidden_layers);
    c.dhe.hidden_width = read_field(*it, sub, "hidden_width", c.dhe.hidden_width);
    c.dhe.buckets = read_field(*it, sub, "buckets", c.dhe.buckets);
  }
  static constexpr std::array<std::string_view, 12> kKnown{
      "kind", "dim", "buckets", "hashes", "alpha", "k",
      "levels", "lambda", "c", "b", "dhe", "name"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      fail(path, key, "unknown field");
    }
  }
  c.validate(path);
  return c;
}

std::int64_t SchemeShape::param_count() const {
  std::int64_t total = 0;
  for (const auto& t : tables) total += t.rows * t.cols;
  return total;
}

std::int64_t resolve_k(const SchemeConfig& config, std::int64_t num_nodes) {
  return config.k > 0 ? config.k : compute_k(num_nodes, config.alpha);
}

std::vector<std::int64_t> level_dims(std::int64_t dim, std::int32_t levels) {
  std::vector<std::int64_t> out;
  for (std::int32_t j = 0; j < levels; ++j) {
    out.push_back(std::max<std::int64_t>(1, j < 63 ? dim >> j : 0));
  }
  return out;
}

std::int64_t default_bucket_factor(std::int64_t num_nodes, std::int64_t m0) {
  // Smallest c with c^2 * m0 >= n, i.e. c = ceil(sqrt(n / m0)).
  auto c = static_cast<std::int64_t>(
      std::sqrt(static_cast<double>(num_nodes) / static_cast<double>(m0)));
  while (c > 0 && (c - 1) * (c - 1) * m0 >= num_nodes) --c;
  while (c * c * m0 < num_nodes) ++c;
  return std::max<std::int64_t>(1, c);
}

SchemeShape resolve_shape(const SchemeConfig& config, std::int64_t num_nodes,
                          std::span<const PartId> level_sizes) {
  config.validate();
  if (num_nodes < 1) throw ConfigError("scheme needs at least one node");
  SchemeShape s;
  const auto d = config.dim;
  const auto n = num_nodes;
  using Table = SchemeShape::Table;

  if (uses_partitions(config.kind)) s.k = resolve_k(config, n);
  if (needs_hierarchy(config.kind)) {
    if (level_sizes.empty()) {
      std::int64_t m = 1;
      for (std::int32_t j = 0; j < config.levels; ++j) {
        m = std::min(m * s.k, n);
        s.level_sizes.push_back(m);
      }
    } else {
      if (static_cast<std::int32_t>(level_sizes.size()) != config.levels) {
        throw ConfigError("hierarchy has " + std::to_string(level_sizes.size()) +
                          " levels but the scheme asks for " +
                          std::to_string(config.levels));
      }
      s.level_sizes.assign(level_sizes.begin(), level_sizes.end());
    }
    s.level_dims = level_dims(d, config.levels);
    for (std::int32_t j = 0; j < config.levels; ++j) {
      s.tables.push_back(
          Table{"P" + std::to_string(j), s.level_sizes[j], s.level_dims[j]});
    }
  }

  switch (config.kind) {
    case SchemeKind::kFullEmb:
      s.tables.push_back(Table{"W", n, d});
      break;
    case SchemeKind::kHashTrick:
      s.buckets = config.buckets;
      s.num_hashes = 1;
      s.tables.push_back(Table{"W", s.buckets, d});
      break;
    case SchemeKind::kRandomPart:
      s.buckets = s.k;
      s.num_hashes = 1;
      s.tables.push_back(Table{"W", s.buckets, d});
      break;
    case SchemeKind::kBloom:
      s.buckets = config.buckets;
      s.num_hashes = config.num_hashes;
      s.tables.push_back(Table{"W", s.buckets, d});
      break;
    case SchemeKind::kHashEmb:
      s.buckets = config.buckets;
      s.num_hashes = config.num_hashes;
      s.tables.push_back(Table{"W", s.buckets, d});
      s.tables.push_back(Table{"Y", n, s.num_hashes});
      break;
    case SchemeKind::kDhe: {
      s.num_hashes = config.dhe.encoding_width;
      s.buckets = config.dhe.buckets;
      std::int64_t in = config.dhe.encoding_width;
      for (std::int32_t l = 0; l <= config.dhe.hidden_layers; ++l) {
        const auto out =
            l == config.dhe.hidden_layers ? d : config.dhe.hidden_width;
        s.tables.push_back(Table{"dhe.W" + std::to_string(l), in, out});
        s.tables.push_back(Table{"dhe.b" + std::to_string(l), 1, out});
        in = out;
      }
      break;
    }
    case SchemeKind::kPosEmb:
      break;
    case SchemeKind::kPosFullEmb:
      s.tables.push_back(Table{"W", n, d});
      break;
    case SchemeKind::kPosHashEmbIntra:
    case SchemeKind::kPosHashEmbInter: {
      const auto m0 = s.level_sizes.front();
      s.c = config.c > 0 ? config.c : default_bucket_factor(n, m0);
      s.num_hashes = config.num_hashes;
      if (config.kind == SchemeKind::kPosHashEmbIntra) {
        if (config.b > 0 && config.b != s.c * m0) {
          throw ConfigError("scheme.b: intra sharing requires b == c * m0 (" +
                            std::to_string(s.c * m0) + ")");
        }
        s.b = s.c * m0;
      } else {
        s.b = config.b > 0 ? config.b : s.c * m0;
      }
      s.tables.push_back(Table{"X", s.b, d});
      s.tables.push_back(Table{"Y", n, s.num_hashes});
      break;
    }
  }
  return s;
}

}  // namespace poshash
