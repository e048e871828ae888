#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "mln/bench.hpp"
#include "mln/community.hpp"
#include "mln/content.hpp"
#include "mln/graph.hpp"
#include "mln/ingest.hpp"
#include "mln/query.hpp"

namespace mln::io {

using Json = nlohmann::json;

/// Parse failures and wrong shapes surface as schema errors; unreadable files
/// as io errors.
Json read_json(const std::filesystem::path& path);
/// Two-space indent with a trailing newline, so output is byte-stable.
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// {"name", "feature", "node_count", "groups": {label: [ids]}}
Json to_json(const PartitionLayer& layer);
PartitionLayer layer_from_json(const Json& j);

// A layer given as raw edges: {"name", "node_count", "edges": [[u, v], ...]}.
struct GraphLayer {
  std::string name;
  Graph graph;
};
bool is_graph_layer(const Json& j);
Json to_json(const GraphLayer& layer);
GraphLayer graph_layer_from_json(const Json& j);

// {"layers", "node_count", "self_preserving", "communities": [{"id", "labels",
// "members"}], "singletons"}
Json to_json(const CommunitySet& cs);
CommunitySet community_set_from_json(const Json& j);

/// Timing-free summary of one detection run.
Json detection_summary(const std::string& layer, const DetectionReport& report);

Json to_json(const QuerySpec& q);
QuerySpec query_spec_from_json(const Json& j);

Json to_json(const QueryResult& r);
/// Header group,label,count,pct.
std::string to_csv(const QueryResult& r);

Json to_json(const TimingReport& r);
/// One row per phase: phase,item,seconds.
std::string to_csv(const TimingReport& r);

// {"id_column", "features": [{"name", "kind", "bins": "age" | [...], "source",
// "threshold", "yes", "no"}]}
DatasetSchema schema_from_json(const Json& j);
Json to_json(const DatasetSchema& s);

Json to_json(const MlpModel& m);
MlpModel mlp_from_json(const Json& j);

Json to_json(const NgramVocabulary& v);
NgramVocabulary vocabulary_from_json(const Json& j);

}  // namespace mln::io
