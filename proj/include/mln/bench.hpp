#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mln/community.hpp"
#include "mln/graph.hpp"
#include "mln/query.hpp"

namespace mln {

struct Workload {
  std::size_t layers = 11;           // M
  NodeId nodes = 20000;              // n
  std::size_t groups = 24;           // values per layer
  double zipf = 0.8;                 // group-size exponent; 0 gives equal odds
  std::size_t queries = 19;          // N
  std::size_t layers_per_query = 3;  // K
  std::uint64_t seed = 7;

  void validate() const;
};

struct GeneratedWorkload {
  MultilayerNetwork mln;
  std::vector<QuerySpec> queries;
};

/// Layer i is named "L<i>" with feature "f<i>" and values "v<j>"; every node
/// draws its value from a Zipf law over the groups. Query j composes K
/// distinct layers picked uniformly and groups by the first two.
GeneratedWorkload generate_workload(const Workload& w);

struct BenchOptions {
  int workers = 0;  // 0 = hardware threads
  std::size_t repetitions = 3;
  DetectOptions detect;
};

struct TimingReport {
  int workers = 1;
  std::size_t repetitions = 0;

  std::vector<std::string> layer_names;
  std::vector<double> layer_detect_seconds;  // median per layer
  std::vector<EdgeCount> layer_edges;
  std::vector<std::size_t> layer_communities;
  double sequential_detect_total = 0.0;  // sum of the per-layer medians
  double parallel_detect_wall = 0.0;     // median wall time on `workers` threads

  std::vector<std::string> query_names;
  std::vector<double> naive_compose_seconds;  // materialize K layers + AND
  std::vector<double> naive_detect_seconds;   // detection on the composed graph
  std::vector<double> eff_query_seconds;      // community intersections only
  std::vector<EdgeCount> composed_edges;
  std::vector<std::size_t> composed_communities;

  double naive_total = 0.0;
  double eff_queries_total = 0.0;
  double eff_total_sequential = 0.0;  // sequential detection + intersections
  double eff_total_parallel = 0.0;    // parallel detection + intersections
  double reduction_sequential_pct = 0.0;
  double reduction_parallel_pct = 0.0;
  double parallel_detect_reduction_pct = 0.0;
};

/// reduction% = 100 * (naive - eff) / naive.
double reduction_percent(double naive, double eff);

/// Times both engines over `queries`. Every query's eff and naive partitions
/// are compared first; a difference throws a mismatch error and no timings
/// are returned.
TimingReport run_benchmark(const MultilayerNetwork& mln, std::span<const QuerySpec> queries,
                           const BenchOptions& options = {});

}  // namespace mln
