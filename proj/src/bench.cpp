#include "mln/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "mln/compose.hpp"
#include "mln/error.hpp"
#include "mln/parallel.hpp"

namespace mln {

void Workload::validate() const {
  if (layers < 2) throw Error(Errc::parameter, fmt::format("need at least 2 layers, got {}", layers));
  if (layers_per_query < 2 || layers_per_query > layers)
    throw Error(Errc::parameter, fmt::format("layers per query must be in [2, {}], got {}", layers,
                                             layers_per_query));
  if (nodes == 0) throw Error(Errc::parameter, "workload needs at least one node");
  if (groups == 0) throw Error(Errc::parameter, "workload needs at least one group per layer");
  if (!(zipf >= 0.0) || !std::isfinite(zipf))
    throw Error(Errc::parameter, fmt::format("Zipf exponent must be finite and >= 0, got {}", zipf));
}

GeneratedWorkload generate_workload(const Workload& w) {
  w.validate();
  GeneratedWorkload out;
  out.mln.node_count = w.nodes;
  std::mt19937_64 rng(w.seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<double> cdf(w.groups);
  double acc = 0.0;
  for (std::size_t k = 0; k < w.groups; ++k) {
    acc += std::pow(static_cast<double>(k + 1), -w.zipf);
    cdf[k] = acc;
  }
  for (auto& c : cdf) c /= acc;

  const int width = static_cast<int>(fmt::formatted_size("{}", w.groups - 1));
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < w.groups; ++k) labels.push_back(fmt::format("v{:0{}}", k, width));

  for (std::size_t i = 0; i < w.layers; ++i) {
    PartitionLayer l;
    l.name = fmt::format("L{}", i + 1);
    l.feature = fmt::format("f{}", i + 1);
    l.node_count = w.nodes;
    for (NodeId u = 0; u < w.nodes; ++u) {
      const auto k = static_cast<std::size_t>(
          std::upper_bound(cdf.begin(), cdf.end() - 1, uniform()) - cdf.begin());
      l.groups[labels[k]].push_back(u);
    }
    out.mln.add_layer(std::move(l));
  }

  std::vector<std::size_t> pick(w.layers);
  for (std::size_t j = 0; j < w.queries; ++j) {
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    for (std::size_t i = 0; i < w.layers_per_query; ++i)
      std::swap(pick[i], pick[i + static_cast<std::size_t>(rng() % (w.layers - i))]);
    QuerySpec q;
    q.name = fmt::format("q{}", j + 1);
    for (std::size_t i = 0; i < w.layers_per_query; ++i)
      q.layers.push_back(out.mln.layers[pick[i]].name);
    q.group_by = out.mln.layers[pick[0]].feature;
    q.report_on = out.mln.layers[pick[1]].feature;
    q.top_k = 0;
    out.queries.push_back(std::move(q));
  }
  return out;
}

double reduction_percent(double naive, double eff) {
  return naive > 0.0 ? 100.0 * (naive - eff) / naive : 0.0;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TimingReport run_benchmark(const MultilayerNetwork& mln, std::span<const QuerySpec> queries,
                           const BenchOptions& options) {
  if (options.workers < 0)
    throw Error(Errc::parameter, fmt::format("workers must be >= 1, got {}", options.workers));
  TimingReport r;
  r.workers = options.workers == 0 ? default_workers() : options.workers;
  r.repetitions = std::max<std::size_t>(1, options.repetitions);
  const std::size_t reps = r.repetitions;
  const std::size_t m = mln.layers.size();

  // Sequential per-layer processing.
  std::vector<DetectionReport> reports(m);
  std::vector<std::vector<double>> layer_times(m);
  for (std::size_t rep = 0; rep < reps; ++rep)
    for (std::size_t i = 0; i < m; ++i) {
      const auto t0 = Clock::now();
      DetectionReport d = detect_layer(mln.layers[i], options.detect);
      layer_times[i].push_back(seconds_since(t0));
      if (rep == 0) reports[i] = std::move(d);
    }
  for (std::size_t i = 0; i < m; ++i) {
    r.layer_names.push_back(mln.layers[i].name);
    r.layer_detect_seconds.push_back(median(layer_times[i]));
    r.layer_edges.push_back(mln.layers[i].edge_count());
    r.layer_communities.push_back(reports[i].community_set.communities.size());
    r.sequential_detect_total += r.layer_detect_seconds.back();
  }

  // Same work spread over the worker pool.
  std::vector<double> walls;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const auto t0 = Clock::now();
    auto par = detect_layers_parallel(mln, options.detect, r.workers);
    walls.push_back(seconds_since(t0));
    for (std::size_t i = 0; i < m; ++i)
      if (par[i].community_set != reports[i].community_set)
        throw Error(Errc::mismatch, fmt::format("parallel detection of '{}' differs from serial",
                                                mln.layers[i].name));
  }
  r.parallel_detect_wall = median(walls);

  const CommunityIndex index = index_reports(mln, reports);
  for (const auto& q : queries) {
    q.validate(mln);
    std::vector<const PartitionLayer*> layers;
    std::vector<const CommunitySet*> sets;
    for (const auto& name : q.layers) {
      layers.push_back(&mln.at(name));
      sets.push_back(&index.find(name)->second);
    }

    std::vector<double> eff_t, compose_t, detect_t;
    CommunitySet eff, naive;
    EdgeCount composed_edges = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      auto t0 = Clock::now();
      eff = eff_comm(sets);
      eff_t.push_back(seconds_since(t0));

      t0 = Clock::now();
      std::vector<Graph> graphs;
      graphs.reserve(layers.size());
      for (const auto* l : layers) graphs.push_back(materialize(*l));
      const Graph composed = and_compose_graphs(graphs);
      compose_t.push_back(seconds_since(t0));

      t0 = Clock::now();
      naive = options.detect.method == DetectMethod::components
                  ? detect_components(composed)
                  : detect_map_equation(composed, options.detect.seed, options.detect.passes);
      detect_t.push_back(seconds_since(t0));
      composed_edges = composed.edge_count();
    }
    if (!eff.same_partition(naive))
      throw Error(Errc::mismatch,
                  fmt::format("query '{}': eff and naive compositions differ", q.name));

    r.query_names.push_back(q.name);
    r.eff_query_seconds.push_back(median(eff_t));
    r.naive_compose_seconds.push_back(median(compose_t));
    r.naive_detect_seconds.push_back(median(detect_t));
    r.composed_edges.push_back(composed_edges);
    r.composed_communities.push_back(naive.communities.size());
  }

  for (std::size_t j = 0; j < r.query_names.size(); ++j) {
    r.naive_total += r.naive_compose_seconds[j] + r.naive_detect_seconds[j];
    r.eff_queries_total += r.eff_query_seconds[j];
  }
  r.eff_total_sequential = r.sequential_detect_total + r.eff_queries_total;
  r.eff_total_parallel = r.parallel_detect_wall + r.eff_queries_total;
  r.reduction_sequential_pct = reduction_percent(r.naive_total, r.eff_total_sequential);
  r.reduction_parallel_pct = reduction_percent(r.naive_total, r.eff_total_parallel);
  r.parallel_detect_reduction_pct =
      reduction_percent(r.sequential_detect_total, r.parallel_detect_wall);
  return r;
}

}  // namespace mln
