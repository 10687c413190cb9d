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

#ifndef POSHASH_PARTITION_H_
#define POSHASH_PARTITION_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "poshash/graph.h"

namespace poshash {

using PartId = std::int32_t;

// k = max(1, ceil(n^alpha)), for 0 < alpha < 1.
std::int64_t compute_k(std::int64_t n, double alpha);

struct PartitionResult {
  std::vector<PartId> membership;
  PartId num_parts = 0;
  std::int64_t edge_cut = 0;
  // Largest part size over the ideal size n / num_parts.
  double balance = 1.0;
};

// Tuning knobs for the multilevel partitioner. Defaults are what every
// caller in this project uses.
struct PartitionOptions {
  // Coarsening stops at max(coarsen_factor * k, coarsen_floor) vertices.
  std::int64_t coarsen_factor = 30;
  std::int64_t coarsen_floor = 200;
  // Allowed part weight over ideal during refinement.
  double imbalance = 1.05;
  int initial_trials = 16;
  int refine_passes = 10;
};

// Multilevel k-way partitioning: heavy-edge matching coarsening, seeded
// greedy region growing on the coarsest graph, then boundary refinement while
// uncoarsening. Part ids are numbered by first appearance in node order.
// With k >= n every node gets its own part.
PartitionResult kway_partition(const Graph& g, std::int64_t k,
                               std::uint64_t seed,
                               const PartitionOptions& options = {});

// Undirected edges whose endpoints lie in different parts. Throws DataError
// if the membership length differs from n or an id is outside [0, n).
std::int64_t edge_cut(const Graph& g, std::span<const PartId> membership);

// Largest part size over n / num_parts.
double partition_balance(std::span<const PartId> membership, PartId num_parts);

// Recursive k-way hierarchy. Level 0 is the coarsest; level j+1 splits each
// level-j part into min(k, part size) parts.
class PartitionHierarchy {
 public:
  PartitionHierarchy() = default;
  // Takes level_membership[level][node]; validates nesting and density.
  PartitionHierarchy(std::int64_t branching, std::int32_t num_nodes,
                     std::vector<std::vector<PartId>> level_membership);

  std::int32_t num_levels() const {
    return static_cast<std::int32_t>(levels_.size());
  }
  std::int32_t num_nodes() const { return num_nodes_; }
  std::int64_t branching() const { return branching_; }
  PartId level_size(std::int32_t level) const { return level_sizes_[level]; }
  std::span<const PartId> level_sizes() const { return level_sizes_; }
  // Total partitions across levels.
  std::int64_t total_parts() const;

  // z_node(level).
  PartId part(NodeId node, std::int32_t level) const {
    return levels_[level][node];
  }
  std::span<const PartId> level(std::int32_t level) const {
    return levels_[level];
  }
  // Parent at level-1 of part `id` at `level` (level >= 1).
  PartId parent(std::int32_t level, PartId id) const {
    return parents_[level][id];
  }

  friend bool operator==(const PartitionHierarchy&,
                         const PartitionHierarchy&) = default;

 private:
  std::int64_t branching_ = 0;
  std::int32_t num_nodes_ = 0;
  std::vector<std::vector<PartId>> levels_;   // [level][node]
  std::vector<PartId> level_sizes_;
  std::vector<std::vector<PartId>> parents_;  // [level][part]; level 0 empty
};

PartitionHierarchy build_hierarchy(const Graph& g, std::int64_t k,
                                   std::int32_t levels, std::uint64_t seed,
                                   const PartitionOptions& options = {});

// CSV with header "node,z0,...,z{L-1}".
void write_hierarchy_csv(const PartitionHierarchy& h, std::ostream& out);
void write_hierarchy_csv(const PartitionHierarchy& h,
                         const std::filesystem::path& path);
PartitionHierarchy read_hierarchy_csv(const std::filesystem::path& path,
                                      std::int64_t branching);

}  // namespace poshash

#endif  // POSHASH_PARTITION_H_
