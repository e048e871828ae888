#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mln {

// Dense index into the node universe shared by every layer of a network.
using NodeId = std::uint32_t;
using EdgeCount = std::uint64_t;
using Edge = std::pair<NodeId, NodeId>;

struct PartitionLayer;

/// Undirected, unweighted simple graph in CSR form. Neighbor lists are sorted
/// ascending; the structure is immutable once built.
class Graph {
 public:
  Graph() = default;
  explicit Graph(NodeId node_count);

  /// Builds from an edge list. Each undirected edge may be listed once in
  /// either orientation; duplicates are collapsed. Self-loops and
  /// out-of-range endpoints raise.
  static Graph from_edges(NodeId node_count, std::span<const Edge> edges);

  /// Adopts CSR arrays directly. Validates shape, sortedness, symmetry and
  /// the absence of self-loops and duplicates.
  static Graph from_csr(std::vector<EdgeCount> offsets, std::vector<NodeId> targets);

  NodeId node_count() const noexcept { return node_count_; }
  EdgeCount edge_count() const noexcept { return targets_.size() / 2; }

  std::size_t degree(NodeId u) const;
  std::span<const NodeId> neighbors(NodeId u) const;
  bool has_edge(NodeId u, NodeId v) const;

  /// Each undirected edge once, as (u, v) with u < v, in ascending order.
  std::vector<Edge> edges() const;

  std::span<const EdgeCount> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> targets() const noexcept { return targets_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  // Builders whose output satisfies the invariants by construction.
  friend Graph materialize(const PartitionLayer& layer);
  friend Graph and_compose_graphs(std::span<const Graph> graphs);

  Graph(NodeId n, std::vector<EdgeCount> offsets, std::vector<NodeId> targets)
      : node_count_(n), offsets_(std::move(offsets)), targets_(std::move(targets)) {}

  NodeId node_count_ = 0;
  std::vector<EdgeCount> offsets_{0};
  std::vector<NodeId> targets_;
};

/// Compact form of a same-value layer: every pair of nodes sharing a feature
/// value is connected, so the layer is a disjoint union of cliques. Nodes
/// absent from every group have no value for the feature.
struct PartitionLayer {
  std::string name;
  std::string feature;
  NodeId node_count = 0;
  std::map<std::string, std::vector<NodeId>> groups;

  /// Throws invalid_partition on a node listed twice, out_of_range on an id
  /// outside the universe.
  void validate() const;

  /// Sorts every group ascending; does not validate.
  void normalize();

  /// Sum over groups of |g|(|g|-1)/2, without materializing.
  EdgeCount edge_count() const;

  /// Value label per node (empty optional label encoded as nullptr).
  std::vector<const std::string*> node_labels() const;

  friend bool operator==(const PartitionLayer&, const PartitionLayer&) = default;
};

/// Expands a partition layer into its clique-union graph.
Graph materialize(const PartitionLayer& layer);

/// Homogeneous multiplex: all layers share one node universe.
struct MultilayerNetwork {
  NodeId node_count = 0;
  std::vector<PartitionLayer> layers;

  /// Appends a layer after checking it belongs to the same universe.
  void add_layer(PartitionLayer layer);

  const PartitionLayer* find(std::string_view name) const;
  const PartitionLayer& at(std::string_view name) const;
};

}  // namespace mln
