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

#ifndef POSHASH_TESTS_TESTING_H_
#define POSHASH_TESTS_TESTING_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "poshash/embedding.h"
#include "poshash/gcn.h"
#include "poshash/graph.h"
#include "poshash/partition.h"
#include "poshash/random.h"

namespace poshash::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("poshash-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<NodeId> iota_ids(NodeId n) {
  std::vector<NodeId> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

// `groups` disjoint cliques of `size` nodes, chained by one edge each.
inline Graph clique_chain(NodeId groups, NodeId size) {
  std::vector<Edge> edges;
  for (NodeId g = 0; g < groups; ++g) {
    for (NodeId i = 0; i < size; ++i) {
      for (NodeId j = i + 1; j < size; ++j) {
        edges.emplace_back(g * size + i, g * size + j);
      }
    }
    if (g + 1 < groups) edges.emplace_back(g * size, (g + 1) * size);
  }
  return Graph::from_edges(groups * size, edges);
}

// Nested communities: level j splits each community into `k` denser
// sub-communities. Every node pair at depth t is joined with prob p[t].
inline Graph nested_communities(std::int64_t k, std::int32_t depth,
                                NodeId leaf_size, std::vector<double> p,
                                std::uint64_t seed) {
  NodeId n = leaf_size;
  for (std::int32_t j = 0; j < depth; ++j) n *= static_cast<NodeId>(k);
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      // Shared prefix length of the community paths.
      std::int32_t shared = 0;
      NodeId span = n;
      while (shared < depth) {
        span /= static_cast<NodeId>(k);
        if (u / span != v / span) break;
        ++shared;
      }
      const double q = p[static_cast<std::size_t>(shared)];
      if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < q) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(n, edges);
}

// Labels and a split where every third node is valid/test.
inline LabeledDataset toy_dataset(NodeId n, std::int32_t classes) {
  LabeledDataset ds;
  ds.num_classes = classes;
  for (NodeId i = 0; i < n; ++i) {
    ds.labels.push_back(i % classes);
    ds.split.push_back(i % 5 < 3 ? Split::kTrain
                       : i % 5 == 3 ? Split::kValid
                                    : Split::kTest);
  }
  return ds;
}

// Balanced random assignment: a seeded shuffle dealt round-robin into k parts.
inline std::vector<PartId> random_partition(NodeId n, std::int64_t k,
                                            std::uint64_t seed) {
  std::vector<NodeId> order = iota_ids(n);
  Rng rng(seed);
  shuffle(std::span<NodeId>(order), rng);
  std::vector<PartId> membership(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) {
    membership[order[i]] = static_cast<PartId>(i % static_cast<std::size_t>(k));
  }
  return membership;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

struct GradCheck {
  std::string name;
  double rel_error = 0.0;
  double analytic_norm = 0.0;
  std::size_t checked = 0;
};

// Central finite differences of the end-to-end loss (scheme -> GCN ->
// cross-entropy on `nodes`) against the analytic gradient, per parameter
// group. Groups larger than `max_entries` are checked on an evenly strided
// subset.
inline std::vector<GradCheck> check_gradients(
    EmbeddingScheme& scheme, GcnModel& model, const SparseMatrix& adj,
    std::span<const std::int32_t> labels, std::span<const NodeId> nodes,
    double step = 1e-5, std::size_t max_entries = 4000) {
  const auto ids = iota_ids(static_cast<NodeId>(adj.rows));
  auto loss = [&] {
    const Matrix x = scheme.forward(ids);
    return cross_entropy(gcn_forward(adj, x, model), labels, nodes).loss;
  };
  scheme.zero_grad();
  model.zero_grad();
  GcnCache cache;
  const Matrix x = scheme.forward(ids);
  const Matrix logits = gcn_forward(adj, x, model, &cache);
  const auto ce = cross_entropy(logits, labels, nodes);
  scheme.backward(ids, gcn_backward(adj, model, cache, ce.grad));

  std::vector<Parameter*> params = scheme.parameters();
  for (Parameter* p : model.parameters()) params.push_back(p);
  std::vector<GradCheck> out;
  for (Parameter* p : params) {
    if (p->value.size() == 0) continue;
    const std::size_t total = p->value.size();
    const std::size_t stride =
        total <= max_entries ? 1 : (total + max_entries - 1) / max_entries;
    double diff = 0.0, na = 0.0, nn = 0.0;
    GradCheck gc{p->name};
    for (std::size_t i = 0; i < total; i += stride) {
      double& w = p->value.values()[i];
      const double saved = w;
      w = saved + step;
      const double up = loss();
      w = saved - step;
      const double down = loss();
      w = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = p->grad.values()[i];
      diff += (numeric - analytic) * (numeric - analytic);
      na += analytic * analytic;
      nn += numeric * numeric;
      ++gc.checked;
    }
    gc.analytic_norm = std::sqrt(na);
    const double scale = std::max({std::sqrt(na), std::sqrt(nn), 1e-12});
    gc.rel_error = std::sqrt(diff) / scale;
    out.push_back(gc);
  }
  return out;
}

}  // namespace poshash::testing

#endif  // POSHASH_TESTS_TESTING_H_
