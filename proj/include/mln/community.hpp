#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mln/graph.hpp"

namespace mln {

struct Community {
  std::uint32_t id = 0;
  std::vector<NodeId> members;                // sorted, non-empty
  std::map<std::string, std::string> labels;  // feature -> value

  friend bool operator==(const Community&, const Community&) = default;
};

/// A partition of the whole node universe into communities (size >= 2) and
/// singletons (every remaining node, isolated ones included).
struct CommunitySet {
  std::vector<std::string> layer_names;
  NodeId node_count = 0;
  std::vector<Community> communities;
  std::vector<NodeId> singletons;
  // Set only by check_self_preserving (or read back from a file it wrote).
  bool self_preserving = false;

  /// Sorts members and singletons, orders communities by smallest member and
  /// renumbers ids 0..k-1.
  void canonicalize();

  /// Throws invalid_input unless communities and singletons partition
  /// 0..node_count-1 with every community of size >= 2.
  void validate() const;

  /// Community index per node, or -1 for singletons.
  std::vector<std::int64_t> membership() const;

  /// Same node partition (ignores ids, labels and layer names).
  bool same_partition(const CommunitySet& other) const;

  friend bool operator==(const CommunitySet&, const CommunitySet&) = default;
};

/// Builds a canonical CommunitySet from a per-node module assignment.
CommunitySet community_set_from_modules(std::span<const std::uint32_t> module_of);

/// Connected components; size-1 components become singletons.
CommunitySet detect_components(const Graph& g);

/// Two-level map-equation partition found by greedy local moving and module
/// aggregation, repeated until no move lowers the code length. Node visit
/// order per level is a seeded shuffle; `passes` bounds the local-moving work
/// per level to passes * node_count node visits.
CommunitySet detect_map_equation(const Graph& g, std::uint64_t seed = 1,
                                 std::uint32_t passes = 20);

/// Two-level code length (natural log) of a module assignment, with visit
/// rates proportional to degree.
double map_equation_codelength(const Graph& g, std::span<const std::uint32_t> module_of);

/// Fraction of possible edges present among u's same-community neighbors;
/// 1 when u has fewer than two of them. nullopt when u is a singleton.
std::optional<double> internal_clustering_coefficient(const Graph& g, const CommunitySet& cs,
                                                      NodeId u);

struct DetectionReport {
  CommunitySet community_set;
  std::vector<std::optional<double>> per_node_icc;  // nullopt for singletons
  bool self_preserving = true;
  double min_icc = 1.0;  // over nodes with >= 2 intra-community neighbors
  std::chrono::duration<double> wall_time{0};
};

/// Computes every member's ICC and flags the set self-preserving iff all of
/// them are 1. Community-induced components that are cliques are recognized
/// in linear time; the rest fall back to exact triangle counting.
DetectionReport check_self_preserving(const Graph& g, const CommunitySet& cs);

/// Labels each community whose members share one value in `layer` with
/// {layer.feature: value}.
void attach_layer_labels(CommunitySet& cs, const PartitionLayer& layer);

enum class DetectMethod { map_equation, components };

struct DetectOptions {
  DetectMethod method = DetectMethod::map_equation;
  std::uint64_t seed = 1;
  std::uint32_t passes = 20;
};

/// Full per-layer processing: materialize, detect, verify self-preservation,
/// label. wall_time covers all of it.
DetectionReport detect_layer(const PartitionLayer& layer, const DetectOptions& options = {});

/// Same, for a layer given directly as a graph (no labels).
DetectionReport detect_graph(const Graph& g, std::string layer_name,
                             const DetectOptions& options = {});

}  // namespace mln
