#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mln/graph.hpp"

namespace mln {

enum class FeatureKind { categorical, binned, derived };

// Closed interval [lower, upper]; a missing bound is unbounded.
struct Bin {
  std::string label;
  std::optional<double> lower;
  std::optional<double> upper;
};

/// Age groups: <=20, 21-30, 31-40, 41-50, 51-60, >=61.
std::vector<Bin> default_age_bins();

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;
  std::vector<Bin> bins;  // binned only

  // derived only: label is yes_label iff source value >= threshold
  std::string source;
  double threshold = 0.0;
  std::string yes_label = "Yes";
  std::string no_label = "No";

  /// Column read from the input table.
  const std::string& column() const { return kind == FeatureKind::derived ? source : name; }

  void validate() const;
};

struct DatasetSchema {
  std::string id_column;
  std::vector<FeatureSpec> features;

  void validate() const;
  const FeatureSpec* find(std::string_view feature) const;
};

using FieldValue = std::variant<std::string, double>;

struct Record {
  NodeId user = 0;
  std::map<std::string, std::optional<FieldValue>> values;
};

/// Records plus the id mapping: keys[user] is the original id-column value.
struct Dataset {
  std::vector<Record> records;
  std::vector<std::string> keys;

  NodeId node_count() const { return static_cast<NodeId>(records.size()); }
};

/// Splits one delimited line, honouring double-quoted fields with "" escapes.
std::vector<std::string> split_delimited(std::string_view line, char delimiter);

/// Strips leading and trailing ASCII whitespace.
std::string_view trim(std::string_view s);

/// Parses a header-led delimited table. Ids are assigned densely in order of
/// first appearance; blank cells become absent values.
Dataset load_records(std::istream& source, const DatasetSchema& schema, char delimiter = ',');

/// Label of the unique bin covering v. Throws out_of_range when none does.
std::string bin_value(const FeatureSpec& spec, double v);

/// Groups users by (binned or derived or raw) value of one feature. Users
/// with no value are left out of every group.
PartitionLayer generate_layer(const Dataset& data, std::string_view feature,
                              const DatasetSchema& schema);

}  // namespace mln
