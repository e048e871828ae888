#include "mln/compose.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "mln/error.hpp"

namespace mln {

std::vector<NodeId> intersect_members(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<NodeId> out;
  out.reserve(std::min(a.size(), b.size()));
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

namespace {

void check_graphs(std::span<const Graph> graphs, std::size_t min_arity) {
  if (graphs.size() < min_arity)
    throw Error(Errc::arity, fmt::format("composition needs at least {} layers, got {}",
                                         min_arity, graphs.size()));
  for (const auto& g : graphs)
    if (g.node_count() != graphs.front().node_count())
      throw Error(Errc::universe, "composed layers have different node universes");
}

template <class Combine>
Graph combine_rows(std::span<const Graph* const> graphs, Combine combine) {
  const NodeId n = graphs.front()->node_count();
  std::vector<EdgeCount> offsets{0};
  offsets.reserve(static_cast<std::size_t>(n) + 1);
  std::vector<NodeId> targets, row, scratch;
  for (NodeId u = 0; u < n; ++u) {
    auto first = graphs.front()->neighbors(u);
    row.assign(first.begin(), first.end());
    for (std::size_t k = 1; k < graphs.size(); ++k) {
      scratch.clear();
      combine(row, graphs[k]->neighbors(u), scratch);
      row.swap(scratch);
    }
    targets.insert(targets.end(), row.begin(), row.end());
    offsets.push_back(targets.size());
  }
  return Graph::from_csr(std::move(offsets), std::move(targets));
}

}  // namespace

Graph and_compose_graphs(std::span<const Graph> graphs) {
  check_graphs(graphs, 2);
  const NodeId n = graphs.front().node_count();
  std::vector<EdgeCount> offsets{0};
  offsets.reserve(static_cast<std::size_t>(n) + 1);
  std::vector<NodeId> targets, row, scratch;
  for (NodeId u = 0; u < n; ++u) {
    auto first = graphs.front().neighbors(u);
    row.assign(first.begin(), first.end());
    for (std::size_t k = 1; k < graphs.size() && !row.empty(); ++k) {
      auto next = graphs[k].neighbors(u);
      scratch.clear();
      std::set_intersection(row.begin(), row.end(), next.begin(), next.end(),
                            std::back_inserter(scratch));
      row.swap(scratch);
    }
    targets.insert(targets.end(), row.begin(), row.end());
    offsets.push_back(targets.size());
  }
  // Intersections of symmetric, loop-free, sorted rows stay that way.
  return Graph(n, std::move(offsets), std::move(targets));
}

namespace experimental {

Graph or_compose_graphs(std::span<const Graph> graphs) {
  check_graphs(graphs, 2);
  std::vector<const Graph*> ptrs;
  for (const auto& g : graphs) ptrs.push_back(&g);
  return combine_rows(ptrs, [](const auto& a, auto b, auto& out) {
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  });
}

Graph and_not_compose_graphs(const Graph& keep, const Graph& remove) {
  if (keep.node_count() != remove.node_count())
    throw Error(Errc::universe, "composed layers have different node universes");
  const Graph* pair[] = {&keep, &remove};
  return combine_rows(pair, [](const auto& a, auto b, auto& out) {
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  });
}

}  // namespace experimental

CommunitySet naive_comm(std::span<const Graph> graphs, const DetectOptions& options,
                        bool verify) {
  const Graph composed = and_compose_graphs(graphs);
  CommunitySet cs = options.method == DetectMethod::components
                        ? detect_components(composed)
                        : detect_map_equation(composed, options.seed, options.passes);
  if (verify && !cs.same_partition(detect_components(composed)))
    throw Error(Errc::mismatch, "map-equation partition of the composed graph differs from its "
                                "connected components");
  cs.self_preserving = true;
  return cs;
}

CommunitySet naive_comm(std::span<const PartitionLayer* const> layers,
                        const DetectOptions& options, bool verify) {
  std::vector<Graph> graphs;
  graphs.reserve(layers.size());
  for (const auto* l : layers) graphs.push_back(materialize(*l));
  CommunitySet cs = naive_comm(graphs, options, verify);
  for (const auto* l : layers) {
    cs.layer_names.push_back(l->name);
    attach_layer_labels(cs, *l);
  }
  return cs;
}

namespace {

struct Block {
  std::vector<NodeId> members;
  std::map<std::string, std::string> labels;
};

void check_sets(std::span<const CommunitySet* const> sets) {
  if (sets.size() < 2)
    throw Error(Errc::arity,
                fmt::format("composition needs at least 2 layers, got {}", sets.size()));
  for (const auto* p : sets) {
    const CommunitySet& cs = *p;
    if (!cs.self_preserving)
      throw Error(Errc::precondition,
                  fmt::format("communities of '{}' are not verified self-preserving; "
                              "intersection would not match recomputation",
                              fmt::join(cs.layer_names, "+")));
    if (cs.node_count != sets.front()->node_count)
      throw Error(Errc::universe, "composed community sets have different node universes");
  }
}

std::vector<Block> initial_blocks(const CommunitySet& cs) {
  std::vector<Block> out;
  out.reserve(cs.communities.size());
  for (const auto& c : cs.communities) out.push_back({c.members, c.labels});
  return out;
}

void merge_labels(std::map<std::string, std::string>& into,
                  const std::map<std::string, std::string>& from) {
  for (const auto& [k, v] : from) into.emplace(k, v);
}

CommunitySet finish(std::span<const CommunitySet* const> sets, std::vector<Block> blocks) {
  CommunitySet out;
  out.node_count = sets.front()->node_count;
  out.self_preserving = true;
  for (const auto* cs : sets)
    out.layer_names.insert(out.layer_names.end(), cs->layer_names.begin(), cs->layer_names.end());
  std::vector<char> covered(out.node_count, 0);
  for (auto& b : blocks) {
    for (NodeId u : b.members) covered[u] = 1;
    out.communities.push_back({0, std::move(b.members), std::move(b.labels)});
  }
  for (NodeId u = 0; u < out.node_count; ++u)
    if (!covered[u]) out.singletons.push_back(u);
  out.canonicalize();
  return out;
}

std::vector<const CommunitySet*> pointers(std::span<const CommunitySet> sets) {
  std::vector<const CommunitySet*> out;
  for (const auto& cs : sets) out.push_back(&cs);
  return out;
}

}  // namespace

CommunitySet eff_comm(std::span<const CommunitySet* const> sets) {
  check_sets(sets);
  std::vector<Block> current = initial_blocks(*sets.front());
  std::vector<std::int64_t> slot;
  std::vector<std::int64_t> used;
  for (std::size_t k = 1; k < sets.size() && !current.empty(); ++k) {
    const CommunitySet& next = *sets[k];
    const auto member_of = next.membership();
    slot.assign(next.communities.size(), -1);
    std::vector<Block> refined;
    for (const Block& b : current) {
      // Bucket b's members by their community in the next layer; each bucket
      // is b ∩ C for one C, and empty intersections are never formed.
      std::vector<Block> parts;
      used.clear();
      for (NodeId u : b.members) {
        const std::int64_t c = member_of[u];
        if (c < 0) continue;
        if (slot[c] < 0) {
          slot[c] = static_cast<std::int64_t>(parts.size());
          used.push_back(c);
          parts.push_back({{}, b.labels});
          merge_labels(parts.back().labels, next.communities[c].labels);
        }
        parts[slot[c]].members.push_back(u);
      }
      for (std::int64_t c : used) slot[c] = -1;
      for (auto& p : parts)
        if (p.members.size() >= 2) refined.push_back(std::move(p));
    }
    current = std::move(refined);
  }
  return finish(sets, std::move(current));
}

CommunitySet eff_comm(std::span<const CommunitySet> sets) { return eff_comm(pointers(sets)); }

CommunitySet eff_comm_reference(std::span<const CommunitySet* const> sets) {
  check_sets(sets);
  std::vector<Block> current = initial_blocks(*sets.front());
  for (std::size_t k = 1; k < sets.size() && !current.empty(); ++k) {
    std::vector<Block> refined;
    for (const Block& b : current)
      for (const Community& c : sets[k]->communities) {
        auto common = intersect_members(b.members, c.members);
        if (common.size() < 2) continue;
        Block part{std::move(common), b.labels};
        merge_labels(part.labels, c.labels);
        refined.push_back(std::move(part));
      }
    current = std::move(refined);
  }
  return finish(sets, std::move(current));
}

CommunitySet eff_comm_reference(std::span<const CommunitySet> sets) {
  return eff_comm_reference(pointers(sets));
}

}  // namespace mln
