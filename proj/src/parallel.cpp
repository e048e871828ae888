#include "mln/parallel.hpp"

#include <exception>
#include <thread>

#include <fmt/format.h>
#include <omp.h>

#include "mln/error.hpp"

namespace mln {
namespace {

int resolve(int workers) {
  if (workers < 0) throw Error(Errc::parameter, fmt::format("workers must be >= 0, got {}", workers));
  return workers == 0 ? default_workers() : workers;
}

// Runs fn(i) for i in [0, n) on `workers` threads. Results land by index;
// the first exception (lowest index) is rethrown after the loop.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<DetectionReport> detect_layers_serial(const MultilayerNetwork& mln,
                                                  const DetectOptions& options) {
  std::vector<DetectionReport> out;
  out.reserve(mln.layers.size());
  for (const auto& l : mln.layers) out.push_back(detect_layer(l, options));
  return out;
}

std::vector<DetectionReport> detect_layers_parallel(const MultilayerNetwork& mln,
                                                    const DetectOptions& options, int workers) {
  std::vector<DetectionReport> out(mln.layers.size());
  parallel_for(out.size(), resolve(workers),
               [&](std::size_t i) { out[i] = detect_layer(mln.layers[i], options); });
  return out;
}

CommunityIndex index_reports(const MultilayerNetwork& mln,
                             std::span<const DetectionReport> reports) {
  if (reports.size() != mln.layers.size())
    throw Error(Errc::mismatch, fmt::format("{} detection reports for {} layers", reports.size(),
                                            mln.layers.size()));
  CommunityIndex index;
  for (std::size_t i = 0; i < reports.size(); ++i)
    index.emplace(mln.layers[i].name, reports[i].community_set);
  return index;
}

std::vector<QueryResult> run_queries_serial(const MultilayerNetwork& mln,
                                            std::span<const QuerySpec> queries, Engine engine,
                                            const CommunityIndex* detected,
                                            const DetectOptions& options) {
  std::vector<QueryResult> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(run_query(mln, q, engine, detected, options));
  return out;
}

std::vector<QueryResult> run_queries_parallel(const MultilayerNetwork& mln,
                                              std::span<const QuerySpec> queries, Engine engine,
                                              const CommunityIndex* detected,
                                              const DetectOptions& options, int workers) {
  std::vector<QueryResult> out(queries.size());
  parallel_for(out.size(), resolve(workers), [&](std::size_t i) {
    out[i] = run_query(mln, queries[i], engine, detected, options);
  });
  return out;
}

}  // namespace mln
