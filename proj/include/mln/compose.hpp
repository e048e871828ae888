#pragma once

#include <span>
#include <vector>

#include "mln/community.hpp"
#include "mln/graph.hpp"

namespace mln {

/// Sorted intersection of two sorted node lists, O(|a| + |b|).
std::vector<NodeId> intersect_members(std::span<const NodeId> a, std::span<const NodeId> b);

/// Edge (u, v) is kept iff it is present in every input graph. Needs at least
/// two graphs over the same universe.
Graph and_compose_graphs(std::span<const Graph> graphs);

namespace experimental {
// Graph-level only; no community-level counterpart exists for these.
Graph or_compose_graphs(std::span<const Graph> graphs);
Graph and_not_compose_graphs(const Graph& keep, const Graph& remove);
}  // namespace experimental

/// Recompute route: AND-compose the graphs and run the map-equation
/// detector on the result. With `verify` set, the partition is checked
/// against connected components of the composed graph and a mismatch raises.
CommunitySet naive_comm(std::span<const Graph> graphs, const DetectOptions& options = {},
                        bool verify = false);

/// Same, starting from partition layers: every layer is materialized first,
/// and the resulting communities carry each layer's value label.
CommunitySet naive_comm(std::span<const PartitionLayer* const> layers,
                        const DetectOptions& options = {}, bool verify = false);

/// Intersection route: left fold of member intersections across the K
/// community sets, stopping early once nothing of size >= 2 survives.
/// Intersections of size 1 become singletons; labels are the union of the
/// parents'. Every input must be flagged self-preserving.
CommunitySet eff_comm(std::span<const CommunitySet* const> sets);
CommunitySet eff_comm(std::span<const CommunitySet> sets);

/// Reference implementation of eff_comm built on all-pairs intersect_members.
/// Quadratic in community count; kept to cross-check eff_comm.
CommunitySet eff_comm_reference(std::span<const CommunitySet* const> sets);
CommunitySet eff_comm_reference(std::span<const CommunitySet> sets);

}  // namespace mln
