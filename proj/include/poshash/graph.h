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

#ifndef POSHASH_GRAPH_H_
#define POSHASH_GRAPH_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "poshash/matrix.h"

namespace poshash {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

struct EdgeStats {
  std::int64_t self_loops_dropped = 0;
  std::int64_t duplicates_dropped = 0;
};

// Undirected graph in canonical CSR form: symmetric adjacency, no self-loops,
// neighbor lists sorted ascending. Immutable once built.
class Graph {
 public:
  Graph() = default;

  // Builds the canonical graph over nodes [0, n). Self-loops and duplicate
  // edges are dropped. With `symmetrize` every pair is inserted in both
  // directions; without it the input must already list both directions.
  static Graph from_edges(NodeId n, std::span<const Edge> edges,
                          bool symmetrize = true, EdgeStats* stats = nullptr);

  // Validates and adopts an existing CSR structure.
  static Graph from_csr(std::vector<std::int64_t> offsets,
                        std::vector<NodeId> neighbors);

  NodeId num_nodes() const { return num_nodes_; }
  // Undirected edge count (each stored twice).
  std::int64_t num_edges() const {
    return static_cast<std::int64_t>(neighbors_.size()) / 2;
  }
  NodeId degree(NodeId u) const {
    return static_cast<NodeId>(offsets_[u + 1] - offsets_[u]);
  }
  std::span<const NodeId> neighbors(NodeId u) const {
    return {neighbors_.data() + offsets_[u],
            static_cast<std::size_t>(offsets_[u + 1] - offsets_[u])};
  }
  std::span<const std::int64_t> offsets() const { return offsets_; }
  std::span<const NodeId> adjacency() const { return neighbors_; }

  // Each undirected edge once, as (u, v) with u < v, in CSR order.
  std::vector<Edge> edge_list() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  NodeId num_nodes_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<NodeId> neighbors_;
};

struct LoadedGraph {
  Graph graph;
  // original_ids[i] is the id used in the file for dense node i.
  std::vector<std::int64_t> original_ids;
  EdgeStats stats;
};

// Reads a whitespace-separated "u v" edge list. '#' lines are comments; a
// "# nodes: N" comment declares dense ids [0, N) and disables remapping,
// otherwise distinct ids are remapped to [0, n) in ascending order.
LoadedGraph load_edge_list(const std::filesystem::path& path,
                           bool symmetrize = true);

// Writes a "# nodes: N" header followed by each undirected edge once.
void save_edge_list(const Graph& g, const std::filesystem::path& path);

enum class Split : std::uint8_t { kNone, kTrain, kValid, kTest };

struct LabeledDataset {
  std::vector<std::int32_t> labels;
  std::int32_t num_classes = 0;
  std::vector<Split> split;

  std::size_t size() const { return labels.size(); }
  // Node ids in the given split, ascending.
  std::vector<NodeId> nodes_in(Split s) const;
  // Throws DataError if labels or split array are inconsistent.
  void validate() const;

  friend bool operator==(const LabeledDataset&,
                         const LabeledDataset&) = default;
};

const char* split_name(Split s);

// Reads "node_id label split" lines. Node ids are interpreted through
// `original_ids` (as produced by load_edge_list); nodes without a line keep
// label 0 and split none.
LabeledDataset load_labels(const std::filesystem::path& path,
                           std::span<const std::int64_t> original_ids);

void save_labels(const LabeledDataset& ds, const std::filesystem::path& path);

struct SbmSample {
  Graph graph;
  LabeledDataset dataset;
};

// Stochastic block model over contiguous blocks (the first n % blocks blocks
// get one extra node). Labels are block ids; the train/valid/test split is
// 60/20/20 over a seeded shuffle.
SbmSample generate_sbm(NodeId n, std::int32_t num_blocks, double p_in,
                       double p_out, std::uint64_t seed);

// CSR sparse matrix with double values.
struct SparseMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<std::int64_t> offsets{0};
  std::vector<NodeId> columns;
  std::vector<double> values;

  Matrix to_dense() const;
};

// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
SparseMatrix normalized_adjacency(const Graph& g);

Matrix spmm(const SparseMatrix& m, const Matrix& x);

}  // namespace poshash

#endif  // POSHASH_GRAPH_H_
