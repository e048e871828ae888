#include "mln/ingest.hpp"

#include <charconv>
#include <istream>
#include <limits>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "mln/error.hpp"

namespace mln {

std::vector<Bin> default_age_bins() {
  return {
      {"≤20", std::nullopt, 20.0}, {"21-30", 21.0, 30.0}, {"31-40", 31.0, 40.0},
      {"41-50", 41.0, 50.0},       {"51-60", 51.0, 60.0}, {"≥61", 61.0, std::nullopt},
  };
}

void FeatureSpec::validate() const {
  if (name.empty()) throw Error(Errc::schema, "feature with empty name");
  if (kind == FeatureKind::derived && source.empty())
    throw Error(Errc::schema, fmt::format("derived feature '{}' has no source column", name));
  if (kind != FeatureKind::binned) return;
  if (bins.empty()) throw Error(Errc::schema, fmt::format("binned feature '{}' has no bins", name));
  std::set<std::string> labels;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const Bin& b = bins[i];
    if (!labels.insert(b.label).second)
      throw Error(Errc::schema, fmt::format("feature '{}': duplicate bin '{}'", name, b.label));
    if (b.lower && b.upper && *b.lower > *b.upper)
      throw Error(Errc::schema, fmt::format("feature '{}': bin '{}' is empty", name, b.label));
    if (i == 0) continue;
    const Bin& prev = bins[i - 1];
    if (!prev.upper || !b.lower || *prev.upper >= *b.lower)
      throw Error(Errc::schema,
                  fmt::format("feature '{}': bins '{}' and '{}' overlap or are out of order", name,
                              prev.label, b.label));
  }
}

void DatasetSchema::validate() const {
  if (id_column.empty()) throw Error(Errc::schema, "schema has no id column");
  std::set<std::string> names;
  for (const auto& f : features) {
    f.validate();
    if (f.name == id_column)
      throw Error(Errc::schema, fmt::format("feature '{}' collides with the id column", f.name));
    if (!names.insert(f.name).second)
      throw Error(Errc::schema, fmt::format("duplicate feature '{}'", f.name));
  }
}

const FeatureSpec* DatasetSchema::find(std::string_view feature) const {
  for (const auto& f : features)
    if (f.name == feature) return &f;
  return nullptr;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_delimited(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error(Errc::value, "unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

std::optional<double> parse_number(std::string_view s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

Dataset load_records(std::istream& source, const DatasetSchema& schema, char delimiter) {
  schema.validate();
  Dataset data;
  std::string line;
  if (!std::getline(source, line)) return data;

  const auto header = split_delimited(line, delimiter);
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t i = 0; i < header.size(); ++i) column_of.emplace(trim(header[i]), i);

  auto require = [&](const std::string& col) {
    auto it = column_of.find(col);
    if (it == column_of.end())
      throw Error(Errc::schema, fmt::format("header has no column '{}'", col));
    return it->second;
  };
  const std::size_t id_col = require(schema.id_column);
  std::vector<std::size_t> feature_col;
  for (const auto& f : schema.features) feature_col.push_back(require(f.column()));

  std::unordered_map<std::string, NodeId> seen;
  std::size_t row = 1;
  while (std::getline(source, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_delimited(line, delimiter);
    auto cell = [&](std::size_t col) -> std::string_view {
      return col < cells.size() ? trim(cells[col]) : std::string_view{};
    };

    std::string key(cell(id_col));
    if (key.empty()) throw Error(Errc::value, fmt::format("row {}: empty id", row));
    const auto user = static_cast<NodeId>(data.records.size());
    if (!seen.emplace(key, user).second)
      throw Error(Errc::duplicate_record, fmt::format("row {}: duplicate id '{}'", row, key));

    Record rec{user, {}};
    for (std::size_t j = 0; j < schema.features.size(); ++j) {
      const auto& f = schema.features[j];
      const auto text = cell(feature_col[j]);
      std::optional<FieldValue> value;
      if (!text.empty()) {
        if (f.kind == FeatureKind::categorical) {
          value = std::string(text);
        } else {
          auto num = parse_number(text);
          if (!num)
            throw Error(Errc::value, fmt::format("row {}: column '{}' value '{}' is not numeric",
                                                 row, f.column(), text));
          value = *num;
        }
      }
      rec.values.emplace(f.name, std::move(value));
    }
    data.records.push_back(std::move(rec));
    data.keys.push_back(std::move(key));
  }
  return data;
}

std::string bin_value(const FeatureSpec& spec, double v) {
  if (spec.kind != FeatureKind::binned)
    throw Error(Errc::schema, fmt::format("feature '{}' is not binned", spec.name));
  for (const auto& b : spec.bins) {
    if (b.lower && v < *b.lower) continue;
    if (b.upper && v > *b.upper) continue;
    return b.label;
  }
  throw Error(Errc::out_of_range, fmt::format("feature '{}': value {} is outside every bin",
                                              spec.name, v));
}

PartitionLayer generate_layer(const Dataset& data, std::string_view feature,
                              const DatasetSchema& schema) {
  const FeatureSpec* spec = schema.find(feature);
  if (!spec) throw Error(Errc::schema, fmt::format("unknown feature '{}'", feature));

  PartitionLayer layer;
  layer.name = spec->name;
  layer.feature = spec->name;
  layer.node_count = data.node_count();
  for (const auto& rec : data.records) {
    auto it = rec.values.find(spec->name);
    if (it == rec.values.end() || !it->second) continue;
    const FieldValue& v = *it->second;
    std::string label;
    switch (spec->kind) {
      case FeatureKind::categorical:
        label = std::get<std::string>(v);
        break;
      case FeatureKind::binned:
        try {
          label = bin_value(*spec, std::get<double>(v));
        } catch (const Error& e) {
          throw Error(e.code(), fmt::format("user '{}': {}", data.keys.at(rec.user), e.what()));
        }
        break;
      case FeatureKind::derived:
        label = std::get<double>(v) >= spec->threshold ? spec->yes_label : spec->no_label;
        break;
    }
    layer.groups[label].push_back(rec.user);
  }
  return layer;
}

}  // namespace mln
