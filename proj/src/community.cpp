#include "mln/community.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "mln/error.hpp"

namespace mln {

void CommunitySet::canonicalize() {
  for (auto& c : communities) std::sort(c.members.begin(), c.members.end());
  std::sort(communities.begin(), communities.end(),
            [](const Community& a, const Community& b) { return a.members < b.members; });
  for (std::size_t i = 0; i < communities.size(); ++i)
    communities[i].id = static_cast<std::uint32_t>(i);
  std::sort(singletons.begin(), singletons.end());
}

void CommunitySet::validate() const {
  std::vector<char> seen(node_count, 0);
  auto mark = [&](NodeId u) {
    if (u >= node_count)
      throw Error(Errc::invalid_input,
                  fmt::format("node {} outside universe of {} nodes", u, node_count));
    if (seen[u]) throw Error(Errc::invalid_input, fmt::format("node {} assigned twice", u));
    seen[u] = 1;
  };
  for (const auto& c : communities) {
    if (c.members.size() < 2)
      throw Error(Errc::invalid_input, fmt::format("community {} has fewer than 2 members", c.id));
    for (NodeId u : c.members) mark(u);
  }
  for (NodeId u : singletons) mark(u);
  const auto missing = std::find(seen.begin(), seen.end(), 0);
  if (missing != seen.end())
    throw Error(Errc::invalid_input,
                fmt::format("node {} is in no community and not a singleton",
                            std::distance(seen.begin(), missing)));
}

std::vector<std::int64_t> CommunitySet::membership() const {
  std::vector<std::int64_t> out(node_count, -1);
  for (std::size_t i = 0; i < communities.size(); ++i)
    for (NodeId u : communities[i].members) out.at(u) = static_cast<std::int64_t>(i);
  return out;
}

bool CommunitySet::same_partition(const CommunitySet& other) const {
  if (node_count != other.node_count) return false;
  auto blocks = [](const CommunitySet& cs) {
    std::vector<std::vector<NodeId>> out;
    out.reserve(cs.communities.size());
    for (const auto& c : cs.communities) {
      auto m = c.members;
      std::sort(m.begin(), m.end());
      out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end());
    auto s = cs.singletons;
    std::sort(s.begin(), s.end());
    return std::pair{std::move(out), std::move(s)};
  };
  return blocks(*this) == blocks(other);
}

CommunitySet community_set_from_modules(std::span<const std::uint32_t> module_of) {
  CommunitySet cs;
  cs.node_count = static_cast<NodeId>(module_of.size());
  const std::size_t k =
      module_of.empty() ? 0 : *std::max_element(module_of.begin(), module_of.end()) + 1;
  std::vector<std::vector<NodeId>> blocks(k);
  for (NodeId u = 0; u < module_of.size(); ++u) blocks[module_of[u]].push_back(u);
  for (auto& b : blocks) {
    if (b.size() >= 2)
      cs.communities.push_back({0, std::move(b), {}});
    else if (b.size() == 1)
      cs.singletons.push_back(b.front());
  }
  cs.canonicalize();
  return cs;
}

CommunitySet detect_components(const Graph& g) {
  const NodeId n = g.node_count();
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> comp(n, unset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] != unset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u))
        if (comp[v] == unset) {
          comp[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  return community_set_from_modules(comp);
}

namespace {

// Sorted neighbors of u that share its community.
std::vector<NodeId> same_community_neighbors(const Graph& g, std::span<const std::int64_t> member_of,
                                             NodeId u) {
  std::vector<NodeId> out;
  for (NodeId v : g.neighbors(u))
    if (member_of[v] == member_of[u]) out.push_back(v);
  return out;
}

std::size_t sorted_intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

// Returns (edges among the neighborhood, neighborhood size).
std::pair<std::uint64_t, std::uint64_t> icc_counts(const Graph& g,
                                                   std::span<const std::int64_t> member_of,
                                                   NodeId u) {
  const auto nbrs = same_community_neighbors(g, member_of, u);
  std::uint64_t twice_edges = 0;
  for (NodeId v : nbrs) twice_edges += sorted_intersection_size(g.neighbors(v), nbrs);
  return {twice_edges / 2, nbrs.size()};
}

double icc_ratio(std::uint64_t edges, std::uint64_t k) {
  if (k < 2) return 1.0;
  return static_cast<double>(edges) / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
}

}  // namespace

std::optional<double> internal_clustering_coefficient(const Graph& g, const CommunitySet& cs,
                                                      NodeId u) {
  if (u >= g.node_count() || cs.node_count != g.node_count())
    throw Error(Errc::out_of_range, fmt::format("node {} outside the community universe", u));
  const auto member_of = cs.membership();
  if (member_of[u] < 0) return std::nullopt;
  const auto [edges, k] = icc_counts(g, member_of, u);
  return icc_ratio(edges, k);
}

DetectionReport check_self_preserving(const Graph& g, const CommunitySet& cs) {
  if (cs.node_count != g.node_count())
    throw Error(Errc::invalid_input,
                fmt::format("community set covers {} nodes, graph has {}", cs.node_count,
                            g.node_count()));
  cs.validate();

  DetectionReport report;
  report.community_set = cs;
  report.per_node_icc.assign(g.node_count(), std::nullopt);
  const auto member_of = cs.membership();

  // Intra-community degree, then components of each community-induced
  // subgraph. A component of size s where every node has intra degree s-1 is
  // a clique, so all of its ICCs are exactly 1.
  const NodeId n = g.node_count();
  std::vector<std::uint64_t> intra(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    if (member_of[u] < 0) continue;
    for (NodeId v : g.neighbors(u))
      if (member_of[v] == member_of[u]) ++intra[u];
  }

  std::vector<char> visited(n, 0);
  std::vector<NodeId> component, stack;
  for (NodeId s = 0; s < n; ++s) {
    if (member_of[s] < 0 || visited[s]) continue;
    component.clear();
    visited[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      component.push_back(u);
      for (NodeId v : g.neighbors(u))
        if (!visited[v] && member_of[v] == member_of[s]) {
          visited[v] = 1;
          stack.push_back(v);
        }
    }
    const bool clique = std::all_of(component.begin(), component.end(), [&](NodeId u) {
      return intra[u] + 1 == component.size();
    });
    for (NodeId u : component) {
      if (clique) {
        report.per_node_icc[u] = 1.0;
        continue;
      }
      const auto [edges, k] = icc_counts(g, member_of, u);
      const double icc = icc_ratio(edges, k);
      report.per_node_icc[u] = icc;
      if (k >= 2 && edges * 2 != k * (k - 1)) {
        report.self_preserving = false;
        report.min_icc = std::min(report.min_icc, icc);
      }
    }
  }
  report.community_set.self_preserving = report.self_preserving;
  return report;
}

void attach_layer_labels(CommunitySet& cs, const PartitionLayer& layer) {
  if (cs.node_count != layer.node_count)
    throw Error(Errc::universe, fmt::format("layer '{}' universe differs from community set",
                                            layer.name));
  const auto labels = layer.node_labels();
  for (auto& c : cs.communities) {
    const std::string* value = labels[c.members.front()];
    const bool uniform = value && std::all_of(c.members.begin(), c.members.end(),
                                              [&](NodeId u) { return labels[u] == value; });
    if (uniform) c.labels[layer.feature] = *value;
  }
}

DetectionReport detect_graph(const Graph& g, std::string layer_name,
                             const DetectOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CommunitySet cs = options.method == DetectMethod::components
                        ? detect_components(g)
                        : detect_map_equation(g, options.seed, options.passes);
  cs.layer_names = {std::move(layer_name)};
  DetectionReport report = check_self_preserving(g, cs);
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

DetectionReport detect_layer(const PartitionLayer& layer, const DetectOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  DetectionReport report = detect_graph(materialize(layer), layer.name, options);
  attach_layer_labels(report.community_set, layer);
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

}  // namespace mln
