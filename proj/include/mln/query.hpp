#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mln/community.hpp"
#include "mln/graph.hpp"

namespace mln {

struct QueryFilter {
  std::string feature;
  std::string label;

  friend bool operator==(const QueryFilter&, const QueryFilter&) = default;
};

/// AND-compose `layers`, keep composed communities whose labels match every
/// filter, then tabulate people by (group_by value, report_on value).
struct QuerySpec {
  std::string name;
  std::vector<std::string> layers;
  std::vector<QueryFilter> filters;
  std::string group_by;
  std::string report_on;
  std::size_t top_k = 3;  // display rows per group; 0 keeps all

  /// Spec error on fewer than two layers or a repeated layer.
  void check_shape() const;

  /// Throws spec errors: fewer than two layers, unknown layers, features not
  /// provided by the listed layers, group_by and report_on on one layer.
  void validate(const MultilayerNetwork& mln) const;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

struct QueryRow {
  std::string group;
  std::string label;
  std::uint64_t count = 0;
  double percentage = 0.0;  // of everyone counted in the group

  friend bool operator==(const QueryRow&, const QueryRow&) = default;
};

struct QueryResult {
  std::string query;
  std::vector<QueryRow> rows;  // by group, then count descending, then label
  std::uint64_t total_members = 0;

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

enum class Engine { eff, naive };

using CommunityIndex = std::map<std::string, CommunitySet, std::less<>>;

/// Tabulates an already composed community set. Singletons count once each,
/// with their values looked up in the layers; people lacking a needed value
/// are skipped.
QueryResult summarize(const MultilayerNetwork& mln, const QuerySpec& q,
                      const CommunitySet& composed);

/// eff intersects the per-layer sets in `detected`; naive materializes and
/// recomputes. Both return the same result.
QueryResult run_query(const MultilayerNetwork& mln, const QuerySpec& q, Engine engine,
                      const CommunityIndex* detected = nullptr, const DetectOptions& options = {});

/// Layer names the canned analyses are written against.
struct CannedLayers {
  std::string age = "age";
  std::string gender = "gender";
  std::string relationship = "relationship";
  std::string political = "political";
  std::string locale = "locale";
  std::array<std::string, 5> traits = {"opn", "con", "ext", "agr", "neu"};
  std::string privacy = "privacy";
  std::string us_locale = "en_US";
};

/// The nineteen compositions behind the four analyses: Q1, Q2a, Q2b x5,
/// Q3a, Q3b x5, Q4a, Q4b x5. Layer names double as feature names.
std::vector<QuerySpec> canned_queries(const CannedLayers& names = {});

}  // namespace mln
