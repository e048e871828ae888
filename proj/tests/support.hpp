#pragma once

// Random generators and brute-force oracles shared by the test binaries. The
// oracles work from definitions (pairwise label equality, union-find, direct
// entropy sums) and share no code with the library routines they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mln/community.hpp"
#include "mln/graph.hpp"

namespace mln::testkit {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random clique-union layer: each node gets one of `groups` values, or no
/// value with probability `missing`.
inline PartitionLayer random_layer(Rng& rng, NodeId n, std::size_t groups, double missing,
                                   std::string name = "L") {
  PartitionLayer l;
  l.name = l.feature = std::move(name);
  l.node_count = n;
  std::bernoulli_distribution absent(missing);
  for (NodeId u = 0; u < n; ++u) {
    if (absent(rng)) continue;
    l.groups["g" + std::to_string(uniform(rng, 0, groups - 1))].push_back(u);
  }
  return l;
}

/// Value of u in the layer, or -1 when u is in no group.
inline std::vector<int> value_of(const PartitionLayer& l) {
  std::vector<int> out(l.node_count, -1);
  int k = 0;
  for (const auto& [label, members] : l.groups) {
    for (NodeId u : members) out[u] = k;
    ++k;
  }
  return out;
}

/// Edge set of a clique-union layer by direct pairwise comparison.
inline std::set<std::pair<NodeId, NodeId>> brute_edges(const PartitionLayer& l) {
  const auto v = value_of(l);
  std::set<std::pair<NodeId, NodeId>> out;
  for (NodeId a = 0; a < l.node_count; ++a)
    for (NodeId b = a + 1; b < l.node_count; ++b)
      if (v[a] >= 0 && v[a] == v[b]) out.emplace(a, b);
  return out;
}

/// Edges present in every layer: pairs that agree on every layer's value.
inline std::set<std::pair<NodeId, NodeId>> brute_and_edges(const std::vector<PartitionLayer>& ls) {
  std::vector<std::vector<int>> vals;
  for (const auto& l : ls) vals.push_back(value_of(l));
  const NodeId n = ls.front().node_count;
  std::set<std::pair<NodeId, NodeId>> out;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b) {
      bool all = true;
      for (const auto& v : vals) all = all && v[a] >= 0 && v[a] == v[b];
      if (all) out.emplace(a, b);
    }
  return out;
}

struct UnionFind {
  std::vector<NodeId> parent;
  explicit UnionFind(NodeId n) : parent(n) { std::iota(parent.begin(), parent.end(), NodeId{0}); }
  NodeId find(NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(NodeId a, NodeId b) { parent[find(a)] = find(b); }
};

/// Node partition as a set of sorted blocks, singletons included.
using Blocks = std::set<std::vector<NodeId>>;

inline Blocks components_of(NodeId n, const std::set<std::pair<NodeId, NodeId>>& edges) {
  UnionFind uf(n);
  for (const auto& [a, b] : edges) uf.unite(a, b);
  std::map<NodeId, std::vector<NodeId>> by_root;
  for (NodeId u = 0; u < n; ++u) by_root[uf.find(u)].push_back(u);
  Blocks out;
  for (auto& [r, m] : by_root) out.insert(m);
  return out;
}

inline Blocks blocks_of(const CommunitySet& cs) {
  Blocks out;
  for (const auto& c : cs.communities) out.insert(c.members);
  for (NodeId u : cs.singletons) out.insert({u});
  return out;
}

inline Graph graph_of(NodeId n, const std::set<std::pair<NodeId, NodeId>>& edges) {
  std::vector<Edge> list(edges.begin(), edges.end());
  return Graph::from_edges(n, list);
}

inline double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

/// Two-level map equation straight from its definition: exit-code entropy
/// weighted by total exit rate plus each module's codebook entropy weighted
/// by its use rate.
inline double map_equation_oracle(const Graph& g, const std::vector<std::uint32_t>& module_of) {
  const double two_m = 2.0 * static_cast<double>(g.edge_count());
  if (two_m == 0.0) return 0.0;
  std::uint32_t k = 0;
  for (auto m : module_of) k = std::max(k, m + 1);
  std::vector<double> exit(k, 0.0), visit(k, 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    visit[module_of[u]] += g.degree(u) / two_m;
    for (NodeId v : g.neighbors(u))
      if (module_of[v] != module_of[u]) exit[module_of[u]] += 1.0 / two_m;
  }
  double q = 0.0;
  for (double e : exit) q += e;
  double index_h = 0.0;
  if (q > 0.0)
    for (double e : exit)
      if (e > 0.0) index_h -= (e / q) * std::log(e / q);
  double total = q * index_h;
  for (std::uint32_t i = 0; i < k; ++i) {
    const double use = exit[i] + visit[i];
    if (use == 0.0) continue;
    double h = 0.0;
    if (exit[i] > 0.0) h -= (exit[i] / use) * std::log(exit[i] / use);
    for (NodeId u = 0; u < g.node_count(); ++u)
      if (module_of[u] == i && g.degree(u) > 0) {
        const double p = (g.degree(u) / two_m) / use;
        h -= p * std::log(p);
      }
    total += use * h;
  }
  return total;
}

}  // namespace mln::testkit
