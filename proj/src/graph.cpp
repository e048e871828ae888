#include "mln/graph.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "mln/error.hpp"

namespace mln {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_partition: return "invalid-partition";
    case Errc::out_of_range: return "out-of-range";
    case Errc::schema: return "schema";
    case Errc::duplicate_record: return "duplicate-record";
    case Errc::value: return "value";
    case Errc::precondition: return "precondition-violation";
    case Errc::arity: return "arity";
    case Errc::universe: return "universe";
    case Errc::shape: return "shape";
    case Errc::training: return "training";
    case Errc::fit: return "fit";
    case Errc::spec: return "spec";
    case Errc::parameter: return "parameter";
    case Errc::io: return "io";
    case Errc::mismatch: return "mismatch";
    case Errc::invalid_input: return "invalid-input";
  }
  return "unknown";
}

Graph::Graph(NodeId node_count)
    : node_count_(node_count), offsets_(static_cast<std::size_t>(node_count) + 1, 0) {}

Graph Graph::from_edges(NodeId node_count, std::span<const Edge> edges) {
  std::vector<EdgeCount> offsets(static_cast<std::size_t>(node_count) + 1, 0);
  for (auto [u, v] : edges) {
    if (u >= node_count || v >= node_count)
      throw Error(Errc::out_of_range,
                  fmt::format("edge ({}, {}) outside universe of {} nodes", u, v, node_count));
    if (u == v) throw Error(Errc::invalid_input, fmt::format("self-loop on node {}", u));
    ++offsets[u + 1];
    ++offsets[v + 1];
  }
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];

  std::vector<NodeId> targets(offsets.back());
  std::vector<EdgeCount> cursor(offsets.begin(), offsets.end() - 1);
  for (auto [u, v] : edges) {
    targets[cursor[u]++] = v;
    targets[cursor[v]++] = u;
  }

  // Sort and deduplicate each list, then compact.
  std::vector<EdgeCount> compact(offsets.size(), 0);
  EdgeCount write = 0;
  for (NodeId u = 0; u < node_count; ++u) {
    auto first = targets.begin() + static_cast<std::ptrdiff_t>(offsets[u]);
    auto last = targets.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]);
    std::sort(first, last);
    auto unique_end = std::unique(first, last);
    for (auto it = first; it != unique_end; ++it) targets[write++] = *it;
    compact[u + 1] = write;
  }
  targets.resize(write);
  targets.shrink_to_fit();
  return Graph(node_count, std::move(compact), std::move(targets));
}

Graph Graph::from_csr(std::vector<EdgeCount> offsets, std::vector<NodeId> targets) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != targets.size())
    throw Error(Errc::invalid_input, "malformed CSR offsets");
  const auto n = static_cast<NodeId>(offsets.size() - 1);
  for (NodeId u = 0; u < n; ++u) {
    if (offsets[u] > offsets[u + 1]) throw Error(Errc::invalid_input, "CSR offsets decrease");
    for (EdgeCount i = offsets[u]; i < offsets[u + 1]; ++i) {
      const NodeId v = targets[i];
      if (v >= n) throw Error(Errc::out_of_range, fmt::format("neighbor {} out of range", v));
      if (v == u) throw Error(Errc::invalid_input, fmt::format("self-loop on node {}", u));
      if (i > offsets[u] && targets[i - 1] >= v)
        throw Error(Errc::invalid_input, fmt::format("neighbors of {} not strictly sorted", u));
    }
  }
  Graph g(n, std::move(offsets), std::move(targets));
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.neighbors(u))
      if (!g.has_edge(v, u))
        throw Error(Errc::invalid_input, fmt::format("edge ({}, {}) not symmetric", u, v));
  return g;
}

std::size_t Graph::degree(NodeId u) const { return neighbors(u).size(); }

std::span<const NodeId> Graph::neighbors(NodeId u) const {
  if (u >= node_count_)
    throw Error(Errc::out_of_range,
                fmt::format("node {} outside universe of {} nodes", u, node_count_));
  return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto adj = neighbors(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count_; ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

void PartitionLayer::validate() const {
  std::vector<char> seen(node_count, 0);
  for (const auto& [label, members] : groups) {
    for (NodeId u : members) {
      if (u >= node_count)
        throw Error(Errc::out_of_range,
                    fmt::format("layer '{}': node {} outside universe of {} nodes", name, u,
                                node_count));
      if (seen[u])
        throw Error(Errc::invalid_partition,
                    fmt::format("layer '{}': node {} appears in more than one group", name, u));
      seen[u] = 1;
    }
  }
}

void PartitionLayer::normalize() {
  for (auto& [label, members] : groups) std::sort(members.begin(), members.end());
}

EdgeCount PartitionLayer::edge_count() const {
  EdgeCount total = 0;
  for (const auto& [label, members] : groups) {
    const EdgeCount s = members.size();
    total += s * (s - (s > 0 ? 1 : 0)) / 2;
  }
  return total;
}

std::vector<const std::string*> PartitionLayer::node_labels() const {
  std::vector<const std::string*> out(node_count, nullptr);
  for (const auto& [label, members] : groups)
    for (NodeId u : members) out[u] = &label;
  return out;
}

Graph materialize(const PartitionLayer& layer) {
  layer.validate();
  const NodeId n = layer.node_count;

  std::vector<EdgeCount> offsets(static_cast<std::size_t>(n) + 1, 0);
  std::vector<const std::vector<NodeId>*> owner(n, nullptr);
  std::vector<std::vector<NodeId>> sorted_groups;
  sorted_groups.reserve(layer.groups.size());
  for (const auto& [label, members] : layer.groups) {
    auto& g = sorted_groups.emplace_back(members);
    std::sort(g.begin(), g.end());
  }
  for (const auto& g : sorted_groups)
    for (NodeId u : g) {
      owner[u] = &g;
      offsets[u + 1] = g.size() - 1;
    }
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];

  std::vector<NodeId> targets(offsets.back());
  for (NodeId u = 0; u < n; ++u) {
    if (!owner[u]) continue;
    auto out = targets.begin() + static_cast<std::ptrdiff_t>(offsets[u]);
    for (NodeId v : *owner[u])
      if (v != u) *out++ = v;
  }
  return Graph(n, std::move(offsets), std::move(targets));
}

void MultilayerNetwork::add_layer(PartitionLayer layer) {
  if (layers.empty() && node_count == 0) node_count = layer.node_count;
  if (layer.node_count != node_count)
    throw Error(Errc::universe,
                fmt::format("layer '{}' has {} nodes, network has {}", layer.name,
                            layer.node_count, node_count));
  if (find(layer.name))
    throw Error(Errc::spec, fmt::format("duplicate layer name '{}'", layer.name));
  layer.validate();
  layers.push_back(std::move(layer));
}

const PartitionLayer* MultilayerNetwork::find(std::string_view name) const {
  for (const auto& l : layers)
    if (l.name == name) return &l;
  return nullptr;
}

const PartitionLayer& MultilayerNetwork::at(std::string_view name) const {
  if (const auto* l = find(name)) return *l;
  throw Error(Errc::spec, fmt::format("unknown layer '{}'", name));
}

}  // namespace mln
