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

#include <map>
#include <set>

#include "doctest.h"
#include "poshash/errors.h"
#include "poshash/partition.h"
#include "poshash/random.h"
#include "testing.h"

namespace poshash {
namespace {

using testing::clique_chain;
using testing::median;
using testing::random_partition;

Graph random_graph(NodeId n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (uniform01(rng) < p) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(n, edges);
}

std::int64_t brute_cut(const Graph& g, std::span<const PartId> z) {
  std::int64_t cut = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) cut += (u < v && z[u] != z[v]);
  }
  return cut;
}

void check_nesting(const PartitionHierarchy& h) {
  for (std::int32_t j = 1; j < h.num_levels(); ++j) {
    std::map<PartId, PartId> parent_of;
    for (NodeId i = 0; i < h.num_nodes(); ++i) {
      const PartId child = h.part(i, j);
      CHECK(h.parent(j, child) == h.part(i, j - 1));
      auto [it, fresh] = parent_of.emplace(child, h.part(i, j - 1));
      CHECK(it->second == h.part(i, j - 1));
    }
  }
}

TEST_CASE("compute_k: reference values") {
  CHECK(compute_k(169343, 1.0 / 8) == 5);
  CHECK(compute_k(2449029, 2.0 / 8) == 40);
  CHECK(compute_k(1, 0.3) == 1);
  CHECK(compute_k(625, 0.25) == 5);     // exact power, no rounding up
  CHECK(compute_k(1000000, 0.5) == 1000);
  CHECK(compute_k(1001, 0.5) == 32);
  // The listed arxiv value at alpha = 2/8 is 25; the ceiling rule gives 21.
  CHECK(compute_k(169343, 2.0 / 8) == 21);
  CHECK_THROWS_AS(compute_k(0, 0.5), ConfigError);
  CHECK_THROWS_AS(compute_k(10, 0.0), ConfigError);
  CHECK_THROWS_AS(compute_k(10, 1.0), ConfigError);
}

TEST_CASE("edge_cut: small cases and brute-force oracle") {
  const std::vector<Edge> path{{0, 1}, {1, 2}};
  const Graph g = Graph::from_edges(3, path);
  CHECK(edge_cut(g, std::vector<PartId>{0, 0, 0}) == 0);
  CHECK(edge_cut(g, std::vector<PartId>{0, 1, 1}) == 1);
  CHECK_THROWS_AS(edge_cut(g, std::vector<PartId>{0, 1}), DataError);
  CHECK_THROWS_AS(edge_cut(g, std::vector<PartId>{0, -1, 1}), DataError);
  CHECK_THROWS_AS(edge_cut(g, std::vector<PartId>{0, 3, 1}), DataError);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph r = random_graph(80, 0.1, seed);
    const auto z = random_partition(80, 6, seed);
    CHECK(edge_cut(r, z) == brute_cut(r, z));
  }
}

TEST_CASE("kway_partition: two cliques separate perfectly") {
  std::vector<Edge> edges;
  for (NodeId c = 0; c < 2; ++c) {
    for (NodeId i = 0; i < 50; ++i) {
      for (NodeId j = i + 1; j < 50; ++j) edges.emplace_back(c * 50 + i, c * 50 + j);
    }
  }
  const Graph g = Graph::from_edges(100, edges);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto r = kway_partition(g, 2, seed);
    CHECK(r.edge_cut == 0);
    CHECK(r.num_parts == 2);
    for (NodeId i = 0; i < 100; ++i) CHECK(r.membership[i] == r.membership[i / 50 * 50]);
  }
}

TEST_CASE("kway_partition: k = 1 and k >= n") {
  const Graph g = random_graph(30, 0.2, 1);
  const auto one = kway_partition(g, 1, 0);
  CHECK(one.num_parts == 1);
  CHECK(one.edge_cut == 0);
  const auto all = kway_partition(g, 40, 0);
  CHECK(all.num_parts == 30);
  CHECK(std::set<PartId>(all.membership.begin(), all.membership.end()).size() == 30);
  CHECK_THROWS_AS(kway_partition(g, 0, 0), ConfigError);
  CHECK_THROWS(kway_partition(Graph(), 2, 0));
}

TEST_CASE("kway_partition: beats random partitions on SBM(300, 3)") {
  const auto s = generate_sbm(300, 3, 0.2, 0.01, 5);
  std::vector<double> ours, random;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ours.push_back(static_cast<double>(kway_partition(s.graph, 3, seed).edge_cut));
    random.push_back(static_cast<double>(
        edge_cut(s.graph, random_partition(300, 3, seed))));
  }
  CHECK(median(ours) < median(random));
  CHECK(median(ours) <= 0.5 * median(random));
}

TEST_CASE("kway_partition: balance, density and determinism on random graphs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const NodeId n = 200 + static_cast<NodeId>(seed) * 30;
    const Graph g = random_graph(n, 6.0 / n, seed);
    for (std::int64_t k : {2, 5, n / 10}) {
      const auto r = kway_partition(g, k, seed);
      CHECK(r.num_parts == k);
      CHECK(r.balance <= 1.10);
      CHECK(r.balance == doctest::Approx(partition_balance(r.membership, r.num_parts)));
      CHECK(r.edge_cut == brute_cut(g, r.membership));
      std::set<PartId> used(r.membership.begin(), r.membership.end());
      CHECK(static_cast<std::int64_t>(used.size()) == k);
      // Canonical numbering: parts appear in increasing order of first node.
      PartId next = 0;
      for (PartId z : r.membership) {
        CHECK(z <= next);
        if (z == next) ++next;
      }
      CHECK(kway_partition(g, k, seed).membership == r.membership);
    }
  }
}

TEST_CASE("build_hierarchy: nested communities reach the full level sizes") {
  const Graph g = testing::nested_communities(5, 3, 5, {0.001, 0.01, 0.1, 0.9}, 3);
  REQUIRE(g.num_nodes() == 625);
  const auto h = build_hierarchy(g, 5, 3, 0);
  CHECK(h.num_levels() == 3);
  CHECK(h.level_size(0) == 5);
  CHECK(h.level_size(1) == 25);
  CHECK(h.level_size(2) == 125);
  CHECK(h.total_parts() == 155);
  check_nesting(h);
  // The planted top-level communities are recovered.
  for (NodeId i = 0; i < 625; ++i) CHECK(h.part(i, 0) == h.part(i / 125 * 125, 0));
}

TEST_CASE("build_hierarchy: L = 1 equals kway_partition") {
  const auto s = generate_sbm(400, 4, 0.1, 0.01, 2);
  const auto h = build_hierarchy(s.graph, 4, 1, 17);
  CHECK(std::vector<PartId>(h.level(0).begin(), h.level(0).end()) ==
        kway_partition(s.graph, 4, 17).membership);
}

TEST_CASE("build_hierarchy: nesting, ordering and determinism") {
  Rng pick(99);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Graph g = random_graph(150, 0.04, seed);
    const auto h = build_hierarchy(g, 3, 4, seed);
    check_nesting(h);
    CHECK(h == build_hierarchy(g, 3, 4, seed));
    for (int t = 0; t < 1000; ++t) {
      const auto i = static_cast<NodeId>(uniform_below(pick, 150));
      const auto j = static_cast<std::int32_t>(1 + uniform_below(pick, 3));
      CHECK(h.parent(j, h.part(i, j)) == h.part(i, j - 1));
    }
    for (std::int32_t j = 1; j < h.num_levels(); ++j) {
      // Children of each part split it into min(k, size) parts, and level
      // ids are ordered by parent.
      std::map<PartId, std::set<PartId>> children;
      std::map<PartId, std::int64_t> size;
      for (NodeId i = 0; i < 150; ++i) {
        children[h.part(i, j - 1)].insert(h.part(i, j));
        ++size[h.part(i, j - 1)];
      }
      PartId expected = 0;
      for (auto& [parent, kids] : children) {
        CHECK(static_cast<std::int64_t>(kids.size()) ==
              std::min<std::int64_t>(3, size[parent]));
        for (PartId kid : kids) CHECK(kid == expected++);
      }
      CHECK(expected == h.level_size(j));
    }
  }
}

TEST_CASE("build_hierarchy: tiny parts become singletons") {
  const Graph g = clique_chain(2, 4);
  const auto h = build_hierarchy(g, 3, 3, 0);
  check_nesting(h);
  CHECK(h.level_size(2) <= 8);
  CHECK(h.level_size(h.num_levels() - 1) >= h.level_size(0));
  CHECK_THROWS_AS(build_hierarchy(g, 1, 2, 0), ConfigError);
  CHECK_THROWS_AS(build_hierarchy(g, 2, 0, 0), ConfigError);
}

TEST_CASE("PartitionHierarchy validates nesting") {
  CHECK_NOTHROW(PartitionHierarchy(2, 4, {{0, 0, 1, 1}, {0, 1, 2, 3}}));
  CHECK_THROWS_AS(PartitionHierarchy(2, 4, {{0, 0, 1, 1}, {0, 0, 0, 1}}),
                  DataError);
  CHECK_THROWS_AS(PartitionHierarchy(2, 4, {{0, 0, 2, 2}}), DataError);
}

TEST_CASE("hierarchy CSV round-trip") {
  testing::TempDir dir("hier");
  const auto s = generate_sbm(120, 3, 0.2, 0.01, 8);
  const auto h = build_hierarchy(s.graph, 3, 3, 1);
  write_hierarchy_csv(h, dir / "h.csv");
  const std::string text = testing::read_text(dir / "h.csv");
  CHECK(text.rfind("node,z0,z1,z2\n", 0) == 0);
  CHECK(read_hierarchy_csv(dir / "h.csv", 3) == h);
}

}  // namespace
}  // namespace poshash
