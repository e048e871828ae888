#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mln/community.hpp"
#include "mln/error.hpp"

namespace mln {
namespace {

inline double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

// One level of the aggregation hierarchy. Level 0 borrows the input graph's
// CSR arrays and uses unit weights.
struct FlowGraph {
  std::span<const EdgeCount> offsets;
  std::span<const NodeId> targets;
  std::span<const double> weights;  // empty: every edge weighs 1
  std::vector<double> volume;       // weighted degree, internal weight counted twice
  std::vector<double> external;     // incident weight excluding internal weight

  std::size_t size() const { return volume.size(); }
  double weight(EdgeCount e) const { return weights.empty() ? 1.0 : weights[e]; }
};

struct OwnedLevel {
  std::vector<EdgeCount> offsets;
  std::vector<NodeId> targets;
  std::vector<double> weights;
  FlowGraph view;
};

// Fisher-Yates over mt19937_64 so the visit order does not depend on the
// standard library's shuffle.
std::vector<NodeId> shuffled_order(std::size_t n, std::mt19937_64& rng) {
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

class LocalMover {
 public:
  LocalMover(const FlowGraph& g, double inv_total)
      : g_(g),
        inv_(inv_total),
        module_(g.size()),
        vol_(g.volume),
        exit_(g.external),
        acc_(g.size(), 0.0),
        in_queue_(g.size(), 0) {
    std::iota(module_.begin(), module_.end(), NodeId{0});
    for (std::size_t i = 0; i < g.size(); ++i) {
      sum_exit_ += exit_[i];
      sum_plogp_exit_ += plogp(exit_[i] * inv_);
      sum_plogp_exit_vol_ += plogp((exit_[i] + vol_[i]) * inv_);
    }
  }

  // Returns true when at least one node changed module.
  bool run(std::mt19937_64& rng, std::uint64_t visit_budget) {
    const std::size_t n = g_.size();
    std::vector<NodeId> queue = shuffled_order(n, rng);
    queue.reserve(2 * n);
    std::fill(in_queue_.begin(), in_queue_.end(), 1);
    std::size_t head = 0;
    bool moved_any = false;
    std::vector<NodeId> touched;

    for (std::uint64_t visits = 0; head < queue.size() && visits < visit_budget; ++visits) {
      const NodeId a = queue[head++];
      in_queue_[a] = 0;
      if (head > n && head * 2 > queue.size()) {
        queue.erase(queue.begin(), queue.begin() + static_cast<std::ptrdiff_t>(head));
        head = 0;
      }

      const NodeId from = module_[a];
      touched.clear();
      for (EdgeCount e = g_.offsets[a]; e < g_.offsets[a + 1]; ++e) {
        const NodeId m = module_[g_.targets[e]];
        if (acc_[m] == 0.0) touched.push_back(m);
        acc_[m] += g_.weight(e);
      }

      const double w_from = acc_[from];
      const double t = g_.external[a];
      const double v = g_.volume[a];
      NodeId best = from;
      double best_delta = -kMinGain;
      memo_.clear();
      for (NodeId to : touched) {
        if (to == from) continue;
        const double d = memoized_delta(from, to, w_from, acc_[to], t, v);
        const bool take = best == from
                              ? d < best_delta
                              : d < best_delta - kTie || (d <= best_delta + kTie && to < best);
        if (take) {
          best_delta = d;
          best = to;
        }
      }
      const double w_to = acc_[best];
      for (NodeId m : touched) acc_[m] = 0.0;

      if (best == from) continue;
      apply(from, best, w_from, w_to, t, v);
      module_[a] = best;
      moved_any = true;
      for (EdgeCount e = g_.offsets[a]; e < g_.offsets[a + 1]; ++e) {
        const NodeId b = g_.targets[e];
        if (module_[b] != best && !in_queue_[b]) {
          in_queue_[b] = 1;
          queue.push_back(b);
        }
      }
    }
    return moved_any;
  }

  const std::vector<NodeId>& modules() const { return module_; }

 private:
  static constexpr double kMinGain = 1e-10;
  static constexpr double kTie = 1e-12;
  static constexpr std::size_t kMemoSize = 8;

  double codelength_part(double sum_exit, double s_exit, double s_exit_vol) const {
    return plogp(sum_exit * inv_) - 2.0 * s_exit + s_exit_vol;
  }

  // The delta depends on the candidate only through (exit, volume, link
  // weight). On clique-heavy levels most candidates are singletons sharing
  // that triple, so a few remembered values cover nearly every evaluation.
  struct MemoEntry {
    double exit, vol, w, delta;
  };

  double memoized_delta(NodeId i, NodeId j, double w_i, double w_j, double t, double v) {
    for (const auto& e : memo_)
      if (e.exit == exit_[j] && e.vol == vol_[j] && e.w == w_j) return e.delta;
    const double d = delta(i, j, w_i, w_j, t, v);
    if (memo_.size() < kMemoSize) memo_.push_back({exit_[j], vol_[j], w_j, d});
    return d;
  }

  double delta(NodeId i, NodeId j, double w_i, double w_j, double t, double v) const {
    const double ei = exit_[i], ej = exit_[j];
    const double ei2 = std::max(0.0, ei - t + 2.0 * w_i);
    const double ej2 = std::max(0.0, ej + t - 2.0 * w_j);
    const double vi2 = vol_[i] - v, vj2 = vol_[j] + v;
    const double s_exit = sum_plogp_exit_ - plogp(ei * inv_) - plogp(ej * inv_) +
                          plogp(ei2 * inv_) + plogp(ej2 * inv_);
    const double s_exit_vol = sum_plogp_exit_vol_ - plogp((ei + vol_[i]) * inv_) -
                              plogp((ej + vol_[j]) * inv_) + plogp((ei2 + vi2) * inv_) +
                              plogp((ej2 + vj2) * inv_);
    const double sum_exit = sum_exit_ + 2.0 * (w_i - w_j);
    return codelength_part(sum_exit, s_exit, s_exit_vol) -
           codelength_part(sum_exit_, sum_plogp_exit_, sum_plogp_exit_vol_);
  }

  void apply(NodeId i, NodeId j, double w_i, double w_j, double t, double v) {
    sum_plogp_exit_ -= plogp(exit_[i] * inv_) + plogp(exit_[j] * inv_);
    sum_plogp_exit_vol_ -= plogp((exit_[i] + vol_[i]) * inv_) + plogp((exit_[j] + vol_[j]) * inv_);
    sum_exit_ += 2.0 * (w_i - w_j);
    exit_[i] = std::max(0.0, exit_[i] - t + 2.0 * w_i);
    exit_[j] = std::max(0.0, exit_[j] + t - 2.0 * w_j);
    vol_[i] -= v;
    vol_[j] += v;
    sum_plogp_exit_ += plogp(exit_[i] * inv_) + plogp(exit_[j] * inv_);
    sum_plogp_exit_vol_ += plogp((exit_[i] + vol_[i]) * inv_) + plogp((exit_[j] + vol_[j]) * inv_);
  }

  const FlowGraph& g_;
  double inv_;
  std::vector<NodeId> module_;
  std::vector<double> vol_;
  std::vector<double> exit_;
  std::vector<double> acc_;
  std::vector<char> in_queue_;
  std::vector<MemoEntry> memo_;
  double sum_exit_ = 0.0;
  double sum_plogp_exit_ = 0.0;
  double sum_plogp_exit_vol_ = 0.0;
};

// Renumbers modules densely in order of first appearance over nodes.
std::size_t renumber(std::vector<NodeId>& module_of) {
  std::vector<NodeId> remap(module_of.size(), static_cast<NodeId>(-1));
  NodeId next = 0;
  for (auto& m : module_of) {
    if (remap[m] == static_cast<NodeId>(-1)) remap[m] = next++;
    m = remap[m];
  }
  return next;
}

OwnedLevel aggregate(const FlowGraph& g, const std::vector<NodeId>& module_of,
                     std::size_t module_count) {
  std::vector<std::size_t> start(module_count + 1, 0);
  for (NodeId m : module_of) ++start[m + 1];
  for (std::size_t i = 1; i <= module_count; ++i) start[i] += start[i - 1];
  std::vector<NodeId> members(g.size());
  {
    std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
    for (NodeId u = 0; u < g.size(); ++u) members[cursor[module_of[u]]++] = u;
  }

  OwnedLevel out;
  out.offsets.assign(1, 0);
  out.view.volume.assign(module_count, 0.0);
  out.view.external.assign(module_count, 0.0);
  std::vector<double> acc(module_count, 0.0);
  std::vector<NodeId> touched;
  for (NodeId a = 0; a < module_count; ++a) {
    touched.clear();
    for (std::size_t k = start[a]; k < start[a + 1]; ++k) {
      const NodeId u = members[k];
      out.view.volume[a] += g.volume[u];
      for (EdgeCount e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
        const NodeId b = module_of[g.targets[e]];
        if (b == a) continue;
        if (acc[b] == 0.0) touched.push_back(b);
        acc[b] += g.weight(e);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (NodeId b : touched) {
      out.targets.push_back(b);
      out.weights.push_back(acc[b]);
      out.view.external[a] += acc[b];
      acc[b] = 0.0;
    }
    out.offsets.push_back(out.targets.size());
  }
  out.view.offsets = out.offsets;
  out.view.targets = out.targets;
  out.view.weights = out.weights;
  return out;
}

}  // namespace

CommunitySet detect_map_equation(const Graph& g, std::uint64_t seed, std::uint32_t passes) {
  const NodeId n = g.node_count();
  std::vector<NodeId> node_module(n);
  std::iota(node_module.begin(), node_module.end(), NodeId{0});
  if (g.edge_count() == 0 || passes == 0) return community_set_from_modules(node_module);

  std::mt19937_64 rng(seed);
  const double inv_total = 1.0 / (2.0 * static_cast<double>(g.edge_count()));

  FlowGraph base;
  base.offsets = g.offsets();
  base.targets = g.targets();
  base.volume.resize(n);
  base.external.resize(n);
  for (NodeId u = 0; u < n; ++u) base.volume[u] = base.external[u] = static_cast<double>(g.degree(u));

  OwnedLevel level;
  const FlowGraph* current = &base;
  while (true) {
    LocalMover mover(*current, inv_total);
    if (!mover.run(rng, static_cast<std::uint64_t>(passes) * current->size())) break;
    std::vector<NodeId> modules = mover.modules();
    const std::size_t count = renumber(modules);
    for (auto& m : node_module) m = modules[m];
    if (count == 1) break;
    level = aggregate(*current, modules, count);
    current = &level.view;
  }
  return community_set_from_modules(node_module);
}

double map_equation_codelength(const Graph& g, std::span<const std::uint32_t> module_of) {
  const NodeId n = g.node_count();
  if (module_of.size() != n)
    throw Error(Errc::shape, "module assignment size differs from node count");
  if (g.edge_count() == 0) return 0.0;
  const double inv = 1.0 / (2.0 * static_cast<double>(g.edge_count()));

  const std::size_t k = n == 0 ? 0 : *std::max_element(module_of.begin(), module_of.end()) + 1;
  std::vector<double> exit(k, 0.0), vol(k, 0.0);
  double node_term = 0.0;
  for (NodeId u = 0; u < n; ++u) {
    const double p = static_cast<double>(g.degree(u)) * inv;
    vol[module_of[u]] += p;
    node_term += plogp(p);
    for (NodeId v : g.neighbors(u))
      if (module_of[v] != module_of[u]) exit[module_of[u]] += inv;
  }
  double total_exit = 0.0, s_exit = 0.0, s_exit_vol = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    total_exit += exit[i];
    s_exit += plogp(exit[i]);
    s_exit_vol += plogp(exit[i] + vol[i]);
  }
  return plogp(total_exit) - 2.0 * s_exit - node_term + s_exit_vol;
}

}  // namespace mln
