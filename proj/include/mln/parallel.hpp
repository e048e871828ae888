#pragma once

#include <span>
#include <vector>

#include "mln/community.hpp"
#include "mln/graph.hpp"
#include "mln/query.hpp"

namespace mln {

/// Threads used when a caller passes workers = 0.
int default_workers();

/// One report per layer, in layer order. The serial form is the reference the
/// parallel form is tested against; results are identical, only timings vary.
std::vector<DetectionReport> detect_layers_serial(const MultilayerNetwork& mln,
                                                  const DetectOptions& options = {});
std::vector<DetectionReport> detect_layers_parallel(const MultilayerNetwork& mln,
                                                    const DetectOptions& options, int workers);

/// Builds the per-layer index the eff engine reads.
CommunityIndex index_reports(const MultilayerNetwork& mln,
                             std::span<const DetectionReport> reports);

std::vector<QueryResult> run_queries_serial(const MultilayerNetwork& mln,
                                            std::span<const QuerySpec> queries, Engine engine,
                                            const CommunityIndex* detected,
                                            const DetectOptions& options = {});
std::vector<QueryResult> run_queries_parallel(const MultilayerNetwork& mln,
                                              std::span<const QuerySpec> queries, Engine engine,
                                              const CommunityIndex* detected,
                                              const DetectOptions& options, int workers);

}  // namespace mln
