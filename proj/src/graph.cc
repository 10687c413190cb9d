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

#include "poshash/graph.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "poshash/errors.h"
#include "poshash/random.h"

namespace poshash {
namespace {

constexpr std::int64_t kMaxNodes = std::numeric_limits<NodeId>::max();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string where(const std::filesystem::path& path, std::int64_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

// Parses a non-negative integer token. Returns nullopt on syntax errors and
// throws on overflow.
std::optional<std::int64_t> parse_id(std::string_view tok,
                                     const std::filesystem::path& path,
                                     std::int64_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range) {
    throw DataError(where(path, line) + "node id overflow '" +
                    std::string(tok) + "'");
  }
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
    return std::nullopt;
  }
  return v;
}

std::optional<std::int64_t> parse_nodes_directive(std::string_view comment) {
  // comment starts after '#'
  comment = trim(comment);
  constexpr std::string_view kKey = "nodes:";
  if (comment.substr(0, kKey.size()) != kKey) return std::nullopt;
  const auto rest = trim(comment.substr(kKey.size()));
  std::int64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(rest.data(), rest.data() + rest.size(), v);
  if (ec != std::errc() || ptr != rest.data() + rest.size() || v < 0) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

Graph Graph::from_edges(NodeId n, std::span<const Edge> edges, bool symmetrize,
                        EdgeStats* stats) {
  if (n < 0) throw DataError("negative node count");
  std::vector<Edge> arcs;
  arcs.reserve(symmetrize ? edges.size() * 2 : edges.size());
  EdgeStats local;
  std::int64_t kept_input = 0;
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw DataError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                      ") out of range for " + std::to_string(n) + " nodes");
    }
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    ++kept_input;
    arcs.emplace_back(u, v);
    if (symmetrize) arcs.emplace_back(v, u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  const auto unique_arcs = static_cast<std::int64_t>(arcs.size());
  local.duplicates_dropped =
      symmetrize ? kept_input - unique_arcs / 2 : kept_input - unique_arcs;

  Graph g;
  g.num_nodes_ = n;
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  g.neighbors_.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    ++g.offsets_[u + 1];
    g.neighbors_.push_back(v);
  }
  for (NodeId u = 0; u < n; ++u) g.offsets_[u + 1] += g.offsets_[u];

  if (!symmetrize) {
    for (const auto& [u, v] : arcs) {
      if (!std::binary_search(arcs.begin(), arcs.end(), Edge{v, u})) {
        throw DataError("edge (" + std::to_string(u) + ", " +
                        std::to_string(v) +
                        ") has no reverse; input is not symmetric");
      }
    }
  }
  if (stats != nullptr) *stats = local;
  return g;
}

Graph Graph::from_csr(std::vector<std::int64_t> offsets,
                      std::vector<NodeId> neighbors) {
  if (offsets.empty() || offsets.front() != 0) {
    throw DataError("CSR offsets must start at 0");
  }
  const auto n = static_cast<std::int64_t>(offsets.size()) - 1;
  if (n > kMaxNodes) throw DataError("too many nodes");
  if (offsets.back() != static_cast<std::int64_t>(neighbors.size())) {
    throw DataError("CSR offsets do not cover the neighbor array");
  }
  for (std::int64_t u = 0; u < n; ++u) {
    if (offsets[u + 1] < offsets[u]) throw DataError("CSR offsets decrease");
    for (auto i = offsets[u]; i < offsets[u + 1]; ++i) {
      const NodeId v = neighbors[i];
      if (v < 0 || v >= n) throw DataError("neighbor id out of range");
      if (v == u) throw DataError("self-loop stored in CSR");
      if (i > offsets[u] && neighbors[i - 1] >= v) {
        throw DataError("neighbor list not strictly ascending");
      }
    }
  }
  Graph g;
  g.num_nodes_ = static_cast<NodeId>(n);
  g.offsets_ = std::move(offsets);
  g.neighbors_ = std::move(neighbors);
  for (NodeId u = 0; u < g.num_nodes_; ++u) {
    for (NodeId v : g.neighbors(u)) {
      const auto nv = g.neighbors(v);
      if (!std::binary_search(nv.begin(), nv.end(), u)) {
        throw DataError("CSR adjacency is not symmetric");
      }
    }
  }
  return g;
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(num_edges()));
  for (NodeId u = 0; u < num_nodes_; ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

LoadedGraph load_edge_list(const std::filesystem::path& path,
                           bool symmetrize) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list " + path.string());

  std::optional<std::int64_t> declared_nodes;
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (auto n = parse_nodes_directive(body.substr(1))) declared_nodes = n;
      continue;
    }
    const auto toks = tokens(body);
    if (toks.size() != 2) {
      throw DataError(where(path, lineno) + "expected two node ids, got '" +
                      std::string(body) + "'");
    }
    const auto u = parse_id(toks[0], path, lineno);
    const auto v = parse_id(toks[1], path, lineno);
    if (!u || !v) {
      throw DataError(where(path, lineno) + "malformed node id in '" +
                      std::string(body) + "'");
    }
    if (declared_nodes && (*u >= *declared_nodes || *v >= *declared_nodes)) {
      throw DataError(where(path, lineno) + "node id overflow: id exceeds "
                      "declared node count " + std::to_string(*declared_nodes));
    }
    raw.emplace_back(*u, *v);
  }

  LoadedGraph out;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  if (declared_nodes) {
    if (*declared_nodes > kMaxNodes) {
      throw DataError(path.string() + ": node id overflow: too many nodes");
    }
    out.original_ids.resize(static_cast<std::size_t>(*declared_nodes));
    for (std::int64_t i = 0; i < *declared_nodes; ++i) out.original_ids[i] = i;
    for (const auto& [u, v] : raw) {
      edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  } else {
    std::vector<std::int64_t> ids;
    ids.reserve(raw.size() * 2);
    for (const auto& [u, v] : raw) {
      ids.push_back(u);
      ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (static_cast<std::int64_t>(ids.size()) > kMaxNodes) {
      throw DataError(path.string() + ": node id overflow: too many nodes");
    }
    auto dense = [&](std::int64_t id) {
      return static_cast<NodeId>(
          std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    for (const auto& [u, v] : raw) edges.emplace_back(dense(u), dense(v));
    out.original_ids = std::move(ids);
  }
  if (out.original_ids.empty()) {
    throw DataError(path.string() + ": empty graph");
  }
  out.graph = Graph::from_edges(static_cast<NodeId>(out.original_ids.size()),
                                edges, symmetrize, &out.stats);
  return out;
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "# nodes: " << g.num_nodes() << "\n";
  for (const auto& [u, v] : g.edge_list()) out << u << ' ' << v << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<NodeId> LabeledDataset::nodes_in(Split s) const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

void LabeledDataset::validate() const {
  if (labels.size() != split.size()) {
    throw DataError("labels and split arrays differ in length");
  }
  if (num_classes < 1) throw DataError("dataset has no classes");
  for (auto l : labels) {
    if (l < 0 || l >= num_classes) {
      throw DataError("label " + std::to_string(l) + " outside [0, " +
                      std::to_string(num_classes) + ")");
    }
  }
}

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
    case Split::kNone:
      break;
  }
  return "none";
}

LabeledDataset load_labels(const std::filesystem::path& path,
                           std::span<const std::int64_t> original_ids) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels file " + path.string());
  const auto n = original_ids.size();
  bool identity = true;
  for (std::size_t i = 0; i < n && identity; ++i) {
    identity = original_ids[i] == static_cast<std::int64_t>(i);
  }
  std::unordered_map<std::int64_t, NodeId> remap;
  if (!identity) {
    for (std::size_t i = 0; i < n; ++i) {
      remap.emplace(original_ids[i], static_cast<NodeId>(i));
    }
  }

  LabeledDataset ds;
  ds.labels.assign(n, 0);
  ds.split.assign(n, Split::kNone);
  std::vector<bool> seen(n, false);
  std::int32_t max_label = -1;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto toks = tokens(body);
    if (toks.size() != 3) {
      throw DataError(where(path, lineno) +
                      "expected 'node_id label split', got '" +
                      std::string(body) + "'");
    }
    const auto id = parse_id(toks[0], path, lineno);
    const auto label = parse_id(toks[1], path, lineno);
    if (!id || !label || *label > std::numeric_limits<std::int32_t>::max()) {
      throw DataError(where(path, lineno) + "malformed integer field");
    }
    NodeId node = -1;
    if (identity) {
      if (*id < static_cast<std::int64_t>(n)) node = static_cast<NodeId>(*id);
    } else if (auto it = remap.find(*id); it != remap.end()) {
      node = it->second;
    }
    if (node < 0) {
      throw DataError(where(path, lineno) + "unknown node id " +
                      std::to_string(*id));
    }
    if (seen[node]) {
      throw DataError(where(path, lineno) + "duplicate entry for node " +
                      std::to_string(*id));
    }
    seen[node] = true;
    Split s;
    if (toks[2] == "train") {
      s = Split::kTrain;
    } else if (toks[2] == "valid") {
      s = Split::kValid;
    } else if (toks[2] == "test") {
      s = Split::kTest;
    } else if (toks[2] == "none") {
      s = Split::kNone;
    } else {
      throw DataError(where(path, lineno) + "unknown split '" +
                      std::string(toks[2]) + "'");
    }
    ds.labels[node] = static_cast<std::int32_t>(*label);
    ds.split[node] = s;
    max_label = std::max(max_label, ds.labels[node]);
  }
  ds.num_classes = max_label + 1;
  ds.validate();
  return ds;
}

void save_labels(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << i << ' ' << ds.labels[i] << ' ' << split_name(ds.split[i]) << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

SbmSample generate_sbm(NodeId n, std::int32_t num_blocks, double p_in,
                       double p_out, std::uint64_t seed) {
  if (num_blocks < 1) throw ConfigError("SBM needs at least one block");
  if (n < num_blocks) {
    throw ConfigError("SBM needs n >= num_blocks (n=" + std::to_string(n) +
                      ", blocks=" + std::to_string(num_blocks) + ")");
  }
  if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0)) {
    throw ConfigError("SBM probabilities must satisfy 0 <= p_out <= p_in <= 1");
  }

  // Contiguous blocks; block_start[b] .. block_start[b + 1].
  std::vector<NodeId> block_start(num_blocks + 1, 0);
  const NodeId base = n / num_blocks;
  const NodeId extra = n % num_blocks;
  for (std::int32_t b = 0; b < num_blocks; ++b) {
    block_start[b + 1] = block_start[b] + base + (b < extra ? 1 : 0);
  }
  SbmSample out;
  auto& ds = out.dataset;
  ds.num_classes = num_blocks;
  ds.labels.resize(n);
  for (std::int32_t b = 0; b < num_blocks; ++b) {
    for (NodeId i = block_start[b]; i < block_start[b + 1]; ++i) {
      ds.labels[i] = b;
    }
  }

  // Geometric skipping over each row segment j > i of constant probability.
  Rng rng(derive_seed(seed, "sbm-edges"));
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    const auto bi = ds.labels[i];
    for (std::int32_t b = bi; b < num_blocks; ++b) {
      const NodeId lo = std::max<NodeId>(block_start[b], i + 1);
      const NodeId hi = block_start[b + 1];
      if (lo >= hi) continue;
      const double p = (b == bi) ? p_in : p_out;
      if (p <= 0.0) continue;
      if (p >= 1.0) {
        for (NodeId j = lo; j < hi; ++j) edges.emplace_back(i, j);
        continue;
      }
      const double log_q = std::log1p(-p);
      std::int64_t j = static_cast<std::int64_t>(lo) - 1;
      while (true) {
        const double skip = std::floor(std::log1p(-uniform01(rng)) / log_q);
        j += 1 + static_cast<std::int64_t>(std::min(skip, 4.0e18));
        if (j >= hi) break;
        edges.emplace_back(i, static_cast<NodeId>(j));
      }
    }
  }
  out.graph = Graph::from_edges(n, edges, true);

  std::vector<NodeId> order(n);
  for (NodeId i = 0; i < n; ++i) order[i] = i;
  Rng split_rng(derive_seed(seed, "sbm-split"));
  shuffle(std::span<NodeId>(order), split_rng);
  const auto n_train = static_cast<std::size_t>(n) * 6 / 10;
  const auto n_valid = static_cast<std::size_t>(n) * 2 / 10;
  ds.split.assign(n, Split::kTest);
  for (std::size_t i = 0; i < n_train; ++i) ds.split[order[i]] = Split::kTrain;
  for (std::size_t i = n_train; i < n_train + n_valid; ++i) {
    ds.split[order[i]] = Split::kValid;
  }
  return out;
}

Matrix SparseMatrix::to_dense() const {
  Matrix out(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (std::int64_t r = 0; r < rows; ++r) {
    for (auto i = offsets[r]; i < offsets[r + 1]; ++i) {
      out(r, columns[i]) += values[i];
    }
  }
  return out;
}

SparseMatrix normalized_adjacency(const Graph& g) {
  const NodeId n = g.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (NodeId u = 0; u < n; ++u) {
    inv_sqrt[u] = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) + 1.0);
  }
  SparseMatrix m;
  m.rows = m.cols = n;
  m.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  m.columns.reserve(g.adjacency().size() + n);
  m.values.reserve(g.adjacency().size() + n);
  for (NodeId u = 0; u < n; ++u) {
    bool self_done = false;
    auto push = [&](NodeId v) {
      m.columns.push_back(v);
      m.values.push_back(inv_sqrt[u] * inv_sqrt[v]);
    };
    for (NodeId v : g.neighbors(u)) {
      if (!self_done && v > u) {
        push(u);
        self_done = true;
      }
      push(v);
    }
    if (!self_done) push(u);
    m.offsets[u + 1] = static_cast<std::int64_t>(m.columns.size());
  }
  return m;
}

Matrix spmm(const SparseMatrix& m, const Matrix& x) {
  if (static_cast<std::size_t>(m.cols) != x.rows()) {
    throw NumericError("spmm: sparse matrix has " + std::to_string(m.cols) +
                       " columns but dense operand has " +
                       std::to_string(x.rows()) + " rows");
  }
  Matrix out(static_cast<std::size_t>(m.rows), x.cols());
  for (std::int64_t r = 0; r < m.rows; ++r) {
    auto dst = out.row(r);
    for (auto i = m.offsets[r]; i < m.offsets[r + 1]; ++i) {
      const double w = m.values[i];
      auto src = x.row(m.columns[i]);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * src[j];
    }
  }
  return out;
}

}  // namespace poshash
