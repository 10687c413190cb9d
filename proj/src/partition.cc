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

#include "poshash/partition.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <utility>

#include "poshash/errors.h"
#include "poshash/random.h"

namespace poshash {
namespace {

// Vertex- and edge-weighted graph used inside the multilevel scheme.
struct WeightedGraph {
  std::int32_t n = 0;
  std::vector<std::int64_t> xadj{0};
  std::vector<std::int32_t> adj;
  std::vector<std::int64_t> ew;
  std::vector<std::int64_t> vw;
  std::int64_t total_vw = 0;
};

WeightedGraph to_weighted(const Graph& g) {
  WeightedGraph w;
  w.n = g.num_nodes();
  w.xadj.assign(g.offsets().begin(), g.offsets().end());
  w.adj.assign(g.adjacency().begin(), g.adjacency().end());
  w.ew.assign(w.adj.size(), 1);
  w.vw.assign(static_cast<std::size_t>(w.n), 1);
  w.total_vw = w.n;
  return w;
}

std::vector<std::int32_t> random_order(std::int32_t n, Rng& rng) {
  std::vector<std::int32_t> order(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) order[i] = i;
  shuffle(std::span<std::int32_t>(order), rng);
  return order;
}

// Heavy-edge matching; fills `cmap` (fine -> coarse) and returns the coarse
// graph.
WeightedGraph coarsen_once(const WeightedGraph& g, std::int64_t max_vw,
                           Rng& rng, std::vector<std::int32_t>& cmap) {
  std::vector<std::int32_t> match(static_cast<std::size_t>(g.n), -1);
  for (std::int32_t u : random_order(g.n, rng)) {
    if (match[u] != -1) continue;
    std::int32_t best = -1;
    std::int64_t best_w = -1;
    for (auto e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      const auto v = g.adj[e];
      if (match[v] != -1 || g.vw[u] + g.vw[v] > max_vw) continue;
      if (g.ew[e] > best_w) {
        best = v;
        best_w = g.ew[e];
      }
    }
    if (best == -1) {
      match[u] = u;
    } else {
      match[u] = best;
      match[best] = u;
    }
  }

  cmap.assign(static_cast<std::size_t>(g.n), -1);
  std::vector<std::pair<std::int32_t, std::int32_t>> members;
  members.reserve(static_cast<std::size_t>(g.n));
  for (std::int32_t u = 0; u < g.n; ++u) {
    if (cmap[u] != -1) continue;
    const auto c = static_cast<std::int32_t>(members.size());
    cmap[u] = c;
    cmap[match[u]] = c;
    members.emplace_back(u, match[u]);
  }

  WeightedGraph cg;
  cg.n = static_cast<std::int32_t>(members.size());
  cg.vw.resize(members.size());
  cg.total_vw = g.total_vw;
  cg.xadj.reserve(members.size() + 1);
  std::vector<std::int64_t> slot(members.size(), -1);
  for (std::int32_t c = 0; c < cg.n; ++c) {
    const auto [a, b] = members[c];
    cg.vw[c] = g.vw[a] + (a != b ? g.vw[b] : 0);
    const auto row_start = static_cast<std::int64_t>(cg.adj.size());
    auto absorb = [&](std::int32_t u) {
      for (auto e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
        const auto cv = cmap[g.adj[e]];
        if (cv == c) continue;
        if (slot[cv] < row_start) {
          slot[cv] = static_cast<std::int64_t>(cg.adj.size());
          cg.adj.push_back(cv);
          cg.ew.push_back(g.ew[e]);
        } else {
          cg.ew[slot[cv]] += g.ew[e];
        }
      }
    };
    absorb(a);
    if (a != b) absorb(b);
    cg.xadj.push_back(static_cast<std::int64_t>(cg.adj.size()));
  }
  return cg;
}

// Per-vertex connectivity to neighboring parts, reusing a k-sized scratch.
class PartConnectivity {
 public:
  explicit PartConnectivity(std::int64_t k)
      : weight_(static_cast<std::size_t>(k), 0) {}

  void gather(const WeightedGraph& g, std::span<const PartId> part,
              std::int32_t v) {
    for (PartId p : touched_) weight_[p] = 0;
    touched_.clear();
    for (auto e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      const PartId p = part[g.adj[e]];
      if (weight_[p] == 0) touched_.push_back(p);
      weight_[p] += g.ew[e];
    }
  }
  std::int64_t to(PartId p) const { return weight_[p]; }
  std::span<const PartId> parts() const { return touched_; }

 private:
  std::vector<std::int64_t> weight_;
  std::vector<PartId> touched_;
};

std::vector<std::int64_t> part_weights(const WeightedGraph& g,
                                       std::span<const PartId> part,
                                       std::int64_t k) {
  std::vector<std::int64_t> pw(static_cast<std::size_t>(k), 0);
  for (std::int32_t v = 0; v < g.n; ++v) pw[part[v]] += g.vw[v];
  return pw;
}

std::int64_t weighted_cut(const WeightedGraph& g,
                          std::span<const PartId> part) {
  std::int64_t cut = 0;
  for (std::int32_t u = 0; u < g.n; ++u) {
    for (auto e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      if (part[u] != part[g.adj[e]]) cut += g.ew[e];
    }
  }
  return cut / 2;
}

// Seeded greedy region growing: parts are grown one at a time from a random
// seed vertex, always absorbing the frontier vertex most connected to the
// region, until the part reaches its share of the remaining weight.
std::vector<PartId> grow_regions(const WeightedGraph& g, std::int64_t k,
                                 Rng& rng) {
  std::vector<PartId> part(static_cast<std::size_t>(g.n), -1);
  std::vector<std::int64_t> conn(static_cast<std::size_t>(g.n), 0);
  std::vector<std::int32_t> pool = random_order(g.n, rng);
  std::size_t pool_pos = 0;
  std::int64_t assigned = 0;

  for (PartId p = 0; p < k; ++p) {
    if (p == k - 1) {
      for (std::int32_t v = 0; v < g.n; ++v) {
        if (part[v] == -1) part[v] = p;
      }
      break;
    }
    const double target =
        static_cast<double>(g.total_vw - assigned) / static_cast<double>(k - p);
    std::int64_t weight = 0;
    std::priority_queue<std::pair<std::int64_t, std::int32_t>> frontier;
    std::vector<std::int32_t> touched;
    while (static_cast<double>(weight) < target) {
      std::int32_t v = -1;
      while (!frontier.empty()) {
        const auto [c, cand] = frontier.top();
        frontier.pop();
        if (part[cand] == -1 && conn[cand] == c) {
          v = cand;
          break;
        }
      }
      if (v == -1) {
        while (pool_pos < pool.size() && part[pool[pool_pos]] != -1) {
          ++pool_pos;
        }
        if (pool_pos == pool.size()) break;
        v = pool[pool_pos];
      }
      const auto next = weight + g.vw[v];
      if (weight > 0 && static_cast<double>(next) - target >
                            target - static_cast<double>(weight)) {
        break;
      }
      part[v] = p;
      weight = next;
      for (auto e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
        const auto u = g.adj[e];
        if (part[u] != -1) continue;
        if (conn[u] == 0) touched.push_back(u);
        conn[u] += g.ew[e];
        frontier.emplace(conn[u], u);
      }
    }
    for (auto u : touched) conn[u] = 0;
    assigned += weight;
  }
  return part;
}

// Moves vertices out of parts heavier than max_weight. Prefers the
// neighboring part with the best gain; falls back to the lightest part.
void rebalance(const WeightedGraph& g, std::vector<PartId>& part,
               std::vector<std::int64_t>& pw, std::int64_t max_weight,
               Rng& rng) {
  const auto k = static_cast<std::int64_t>(pw.size());
  auto overweight = [&] {
    return std::any_of(pw.begin(), pw.end(),
                       [&](std::int64_t w) { return w > max_weight; });
  };
  PartConnectivity conn(k);
  for (int round = 0; round < 8 && overweight(); ++round) {
    bool moved = false;
    for (std::int32_t v : random_order(g.n, rng)) {
      const PartId from = part[v];
      if (pw[from] <= max_weight || pw[from] == g.vw[v]) continue;
      conn.gather(g, part, v);
      PartId best = -1;
      std::int64_t best_gain = std::numeric_limits<std::int64_t>::min();
      for (PartId q : conn.parts()) {
        if (q == from || pw[q] + g.vw[v] > max_weight) continue;
        const auto gain = conn.to(q) - conn.to(from);
        if (gain > best_gain || (gain == best_gain && pw[q] < pw[best])) {
          best = q;
          best_gain = gain;
        }
      }
      if (best == -1) continue;
      part[v] = best;
      pw[from] -= g.vw[v];
      pw[best] += g.vw[v];
      moved = true;
    }
    if (!moved) break;
  }
  // Fallback for parts with no feasible boundary move.
  for (std::int32_t v : random_order(g.n, rng)) {
    if (!overweight()) break;
    const PartId from = part[v];
    if (pw[from] <= max_weight || pw[from] == g.vw[v]) continue;
    const auto lightest = static_cast<PartId>(
        std::min_element(pw.begin(), pw.end()) - pw.begin());
    if (lightest == from || pw[lightest] + g.vw[v] > max_weight) continue;
    part[v] = lightest;
    pw[from] -= g.vw[v];
    pw[lightest] += g.vw[v];
  }
}

// Greedy boundary refinement: moves a vertex to the neighboring part with the
// largest positive gain, or a zero-gain move that improves balance.
void refine(const WeightedGraph& g, std::vector<PartId>& part,
            std::vector<std::int64_t>& pw, std::int64_t max_weight,
            int passes, Rng& rng) {
  PartConnectivity conn(static_cast<std::int64_t>(pw.size()));
  for (int pass = 0; pass < passes; ++pass) {
    std::int64_t moved = 0;
    for (std::int32_t v : random_order(g.n, rng)) {
      const PartId from = part[v];
      if (pw[from] == g.vw[v]) continue;
      conn.gather(g, part, v);
      PartId best = -1;
      std::int64_t best_gain = std::numeric_limits<std::int64_t>::min();
      for (PartId q : conn.parts()) {
        if (q == from || pw[q] + g.vw[v] > max_weight) continue;
        const auto gain = conn.to(q) - conn.to(from);
        if (gain > best_gain || (gain == best_gain && pw[q] < pw[best])) {
          best = q;
          best_gain = gain;
        }
      }
      if (best == -1) continue;
      const bool improves_balance = pw[best] + g.vw[v] < pw[from];
      if (best_gain > 0 || (best_gain == 0 && improves_balance)) {
        part[v] = best;
        pw[from] -= g.vw[v];
        pw[best] += g.vw[v];
        ++moved;
      }
    }
    if (moved == 0) break;
  }
}

// Gives every empty part one vertex taken from the currently largest part.
void fill_empty_parts(const WeightedGraph& g, std::vector<PartId>& part,
                      std::vector<std::int64_t>& pw) {
  const auto k = static_cast<PartId>(pw.size());
  PartConnectivity conn(k);
  for (PartId p = 0; p < k; ++p) {
    if (pw[p] != 0) continue;
    const auto donor = static_cast<PartId>(
        std::max_element(pw.begin(), pw.end()) - pw.begin());
    std::int32_t pick = -1;
    std::int64_t pick_internal = std::numeric_limits<std::int64_t>::max();
    for (std::int32_t v = 0; v < g.n; ++v) {
      if (part[v] != donor) continue;
      conn.gather(g, part, v);
      if (conn.to(donor) < pick_internal) {
        pick = v;
        pick_internal = conn.to(donor);
      }
    }
    part[pick] = p;
    pw[donor] -= g.vw[pick];
    pw[p] += g.vw[pick];
  }
}

std::int64_t max_part_weight(std::int64_t total, std::int64_t k,
                             double imbalance) {
  const double ideal = static_cast<double>(total) / static_cast<double>(k);
  const auto tolerant = static_cast<std::int64_t>(std::floor(imbalance * ideal));
  const auto ceiling = (total + k - 1) / k;
  return std::max(tolerant, ceiling);
}

std::int64_t overweight_amount(std::span<const std::int64_t> pw,
                               std::int64_t max_weight) {
  std::int64_t over = 0;
  for (auto w : pw) over += std::max<std::int64_t>(0, w - max_weight);
  return over;
}

std::vector<PartId> renumber_by_first_appearance(std::span<const PartId> part,
                                                 PartId num_parts) {
  std::vector<PartId> relabel(static_cast<std::size_t>(num_parts), -1);
  PartId next = 0;
  std::vector<PartId> out(part.size());
  for (std::size_t i = 0; i < part.size(); ++i) {
    if (relabel[part[i]] == -1) relabel[part[i]] = next++;
    out[i] = relabel[part[i]];
  }
  return out;
}

}  // namespace

std::int64_t compute_k(std::int64_t n, double alpha) {
  if (n < 1) throw ConfigError("compute_k needs n >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
  const double x = std::pow(static_cast<double>(n), alpha);
  // Powers that land on an integer up to rounding noise count as exact.
  const double nearest = std::round(x);
  const double k = std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)
                       ? nearest
                       : std::ceil(x);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(k));
}

std::int64_t edge_cut(const Graph& g, std::span<const PartId> membership) {
  const auto n = g.num_nodes();
  if (membership.size() != static_cast<std::size_t>(n)) {
    throw DataError("membership has " + std::to_string(membership.size()) +
                    " entries for a graph with " + std::to_string(n) +
                    " nodes");
  }
  for (auto p : membership) {
    if (p < 0 || p >= n) {
      throw DataError("partition id " + std::to_string(p) + " out of range");
    }
  }
  std::int64_t cut = 0;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v && membership[u] != membership[v]) ++cut;
    }
  }
  return cut;
}

double partition_balance(std::span<const PartId> membership,
                         PartId num_parts) {
  if (membership.empty() || num_parts <= 0) return 1.0;
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(num_parts), 0);
  for (auto p : membership) ++sizes[p];
  const double ideal =
      static_cast<double>(membership.size()) / static_cast<double>(num_parts);
  return static_cast<double>(*std::max_element(sizes.begin(), sizes.end())) /
         ideal;
}

PartitionResult kway_partition(const Graph& g, std::int64_t k,
                               std::uint64_t seed,
                               const PartitionOptions& options) {
  const NodeId n = g.num_nodes();
  if (n == 0) throw DataError("cannot partition an empty graph");
  if (k < 1) throw ConfigError("k must be at least 1");

  PartitionResult result;
  if (k >= n) {
    result.membership.resize(static_cast<std::size_t>(n));
    for (NodeId i = 0; i < n; ++i) result.membership[i] = i;
    result.num_parts = n;
  } else if (k == 1) {
    result.membership.assign(static_cast<std::size_t>(n), 0);
    result.num_parts = 1;
  } else {
    Rng rng(derive_seed(seed, "kway"));
    const std::int64_t threshold =
        std::max(options.coarsen_factor * k, options.coarsen_floor);

    std::vector<WeightedGraph> graphs;
    std::vector<std::vector<std::int32_t>> cmaps;
    graphs.push_back(to_weighted(g));
    while (graphs.back().n > threshold) {
      const auto& fine = graphs.back();
      const auto max_vw = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(1.5 * static_cast<double>(fine.total_vw) /
                                       static_cast<double>(threshold)));
      std::vector<std::int32_t> cmap;
      auto coarse = coarsen_once(fine, max_vw, rng, cmap);
      if (coarse.n >= fine.n) break;
      const bool stalled = coarse.n > fine.n - fine.n / 20;
      graphs.push_back(std::move(coarse));
      cmaps.push_back(std::move(cmap));
      if (stalled) break;
    }

    // Best of several seeded initial partitions on the coarsest graph.
    const auto& coarsest = graphs.back();
    const auto coarse_max =
        max_part_weight(coarsest.total_vw, k, options.imbalance);
    std::vector<PartId> part;
    std::pair<std::int64_t, std::int64_t> best_score{
        std::numeric_limits<std::int64_t>::max(), 0};
    for (int trial = 0; trial < std::max(1, options.initial_trials); ++trial) {
      Rng trial_rng(derive_seed(seed, "kway-initial", trial));
      auto candidate = grow_regions(coarsest, k, trial_rng);
      auto pw = part_weights(coarsest, candidate, k);
      rebalance(coarsest, candidate, pw, coarse_max, trial_rng);
      refine(coarsest, candidate, pw, coarse_max, options.refine_passes,
             trial_rng);
      const std::pair score{overweight_amount(pw, coarse_max),
                            weighted_cut(coarsest, candidate)};
      if (part.empty() || score < best_score) {
        best_score = score;
        part = std::move(candidate);
      }
    }

    // Project back and refine at each finer level.
    for (auto level = static_cast<std::ptrdiff_t>(cmaps.size()) - 1;
         level >= 0; --level) {
      const auto& fine = graphs[static_cast<std::size_t>(level)];
      const auto& cmap = cmaps[static_cast<std::size_t>(level)];
      std::vector<PartId> projected(static_cast<std::size_t>(fine.n));
      for (std::int32_t v = 0; v < fine.n; ++v) projected[v] = part[cmap[v]];
      part = std::move(projected);
      const auto max_w = max_part_weight(fine.total_vw, k, options.imbalance);
      auto pw = part_weights(fine, part, k);
      rebalance(fine, part, pw, max_w, rng);
      refine(fine, part, pw, max_w, options.refine_passes, rng);
    }

    const auto& finest = graphs.front();
    auto pw = part_weights(finest, part, k);
    fill_empty_parts(finest, part, pw);
    const auto max_w = max_part_weight(finest.total_vw, k, options.imbalance);
    rebalance(finest, part, pw, max_w, rng);
    result.num_parts = static_cast<PartId>(k);
    result.membership = renumber_by_first_appearance(part, result.num_parts);
  }
  result.edge_cut = edge_cut(g, result.membership);
  result.balance = partition_balance(result.membership, result.num_parts);
  return result;
}

PartitionHierarchy::PartitionHierarchy(
    std::int64_t branching, std::int32_t num_nodes,
    std::vector<std::vector<PartId>> level_membership)
    : branching_(branching),
      num_nodes_(num_nodes),
      levels_(std::move(level_membership)) {
  if (levels_.empty()) throw DataError("hierarchy needs at least one level");
  parents_.resize(levels_.size());
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    const auto& lvl = levels_[j];
    if (lvl.size() != static_cast<std::size_t>(num_nodes)) {
      throw DataError("hierarchy level " + std::to_string(j) +
                      " has wrong length");
    }
    PartId max_id = -1;
    for (auto p : lvl) {
      if (p < 0) throw DataError("negative partition id in hierarchy");
      max_id = std::max(max_id, p);
    }
    const PartId m = max_id + 1;
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    for (auto p : lvl) used[p] = true;
    if (std::find(used.begin(), used.end(), false) != used.end()) {
      throw DataError("hierarchy level " + std::to_string(j) +
                      " has an empty partition id");
    }
    level_sizes_.push_back(m);
    if (j == 0) continue;
    auto& parent = parents_[j];
    parent.assign(static_cast<std::size_t>(m), -1);
    for (std::int32_t i = 0; i < num_nodes; ++i) {
      const PartId child = lvl[i];
      const PartId up = levels_[j - 1][i];
      if (parent[child] == -1) {
        parent[child] = up;
      } else if (parent[child] != up) {
        throw DataError("hierarchy level " + std::to_string(j) +
                        " is not nested in level " + std::to_string(j - 1));
      }
    }
  }
}

std::int64_t PartitionHierarchy::total_parts() const {
  std::int64_t total = 0;
  for (auto m : level_sizes_) total += m;
  return total;
}

PartitionHierarchy build_hierarchy(const Graph& g, std::int64_t k,
                                   std::int32_t levels, std::uint64_t seed,
                                   const PartitionOptions& options) {
  if (k < 2) throw ConfigError("hierarchy branching factor k must be >= 2");
  if (levels < 1) throw ConfigError("hierarchy needs L >= 1");
  const NodeId n = g.num_nodes();
  std::vector<std::vector<PartId>> membership;
  auto top = kway_partition(g, k, seed, options);
  membership.push_back(std::move(top.membership));
  PartId parts_above = top.num_parts;

  std::vector<NodeId> local(static_cast<std::size_t>(n), -1);
  for (std::int32_t j = 1; j < levels; ++j) {
    const auto& above = membership.back();
    std::vector<std::vector<NodeId>> groups(static_cast<std::size_t>(parts_above));
    for (NodeId i = 0; i < n; ++i) groups[above[i]].push_back(i);

    std::vector<PartId> current(static_cast<std::size_t>(n), -1);
    PartId next_id = 0;
    const auto level_seed = derive_seed(seed, "hierarchy-level", j);
    for (PartId p = 0; p < parts_above; ++p) {
      const auto& nodes = groups[p];
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        local[nodes[i]] = static_cast<NodeId>(i);
      }
      std::vector<std::int64_t> offsets{0};
      std::vector<NodeId> adj;
      for (NodeId u : nodes) {
        for (NodeId v : g.neighbors(u)) {
          if (above[v] == p) adj.push_back(local[v]);
        }
        offsets.push_back(static_cast<std::int64_t>(adj.size()));
      }
      const auto sub = Graph::from_csr(std::move(offsets), std::move(adj));
      const auto parts = std::min<std::int64_t>(
          k, static_cast<std::int64_t>(nodes.size()));
      const auto r = kway_partition(sub, parts, derive_seed(level_seed, "part", p),
                                    options);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        current[nodes[i]] = next_id + r.membership[i];
      }
      next_id += r.num_parts;
    }
    membership.push_back(std::move(current));
    parts_above = next_id;
  }
  return PartitionHierarchy(k, n, std::move(membership));
}

void write_hierarchy_csv(const PartitionHierarchy& h, std::ostream& out) {
  out << "node";
  for (std::int32_t j = 0; j < h.num_levels(); ++j) out << ",z" << j;
  out << '\n';
  for (NodeId i = 0; i < h.num_nodes(); ++i) {
    out << i;
    for (std::int32_t j = 0; j < h.num_levels(); ++j) out << ',' << h.part(i, j);
    out << '\n';
  }
}

void write_hierarchy_csv(const PartitionHierarchy& h,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_hierarchy_csv(h, out);
  if (!out) throw DataError("write failed for " + path.string());
}

PartitionHierarchy read_hierarchy_csv(const std::filesystem::path& path,
                                      std::int64_t branching) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open hierarchy " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("node", 0) != 0) {
    throw DataError(path.string() + ": missing 'node,z0,...' header");
  }
  const auto levels = std::count(line.begin(), line.end(), ',');
  if (levels < 1) throw DataError(path.string() + ": no level columns");
  std::vector<std::vector<PartId>> membership(static_cast<std::size_t>(levels));
  std::int64_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    if (std::stoll(cell) != expected) {
      throw DataError(path.string() + ": rows must list nodes 0..n-1 in order");
    }
    for (auto& lvl : membership) {
      if (!std::getline(row, cell, ',')) {
        throw DataError(path.string() + ": short row for node " +
                        std::to_string(expected));
      }
      lvl.push_back(static_cast<PartId>(std::stol(cell)));
    }
    ++expected;
  }
  return PartitionHierarchy(branching, static_cast<std::int32_t>(expected),
                            std::move(membership));
}

}  // namespace poshash
