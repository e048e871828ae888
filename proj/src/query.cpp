#include "mln/query.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "mln/compose.hpp"
#include "mln/error.hpp"

namespace mln {
namespace {

const PartitionLayer* layer_with_feature(const MultilayerNetwork& mln, const QuerySpec& q,
                                         std::string_view feature) {
  for (const auto& name : q.layers) {
    const auto& l = mln.at(name);
    if (l.feature == feature) return &l;
  }
  return nullptr;
}

}  // namespace

void QuerySpec::check_shape() const {
  if (layers.size() < 2)
    throw Error(Errc::spec, fmt::format("query '{}' composes {} layer(s); at least 2 are needed",
                                        name, layers.size()));
  std::set<std::string> unique(layers.begin(), layers.end());
  if (unique.size() != layers.size())
    throw Error(Errc::spec, fmt::format("query '{}' lists a layer twice", name));
}

void QuerySpec::validate(const MultilayerNetwork& mln) const {
  check_shape();
  for (const auto& l : layers) mln.at(l);

  const auto* group_layer = layer_with_feature(mln, *this, group_by);
  const auto* report_layer = layer_with_feature(mln, *this, report_on);
  if (!group_layer)
    throw Error(Errc::spec, fmt::format("query '{}': no composed layer carries group_by "
                                        "feature '{}'", name, group_by));
  if (!report_layer)
    throw Error(Errc::spec, fmt::format("query '{}': no composed layer carries report_on "
                                        "feature '{}'", name, report_on));
  if (group_layer == report_layer)
    throw Error(Errc::spec, fmt::format("query '{}': group_by and report_on come from the same "
                                        "layer '{}'", name, group_layer->name));
  for (const auto& f : filters)
    if (!layer_with_feature(mln, *this, f.feature))
      throw Error(Errc::spec, fmt::format("query '{}': filter feature '{}' is not in the "
                                          "composed layers", name, f.feature));
}

QueryResult summarize(const MultilayerNetwork& mln, const QuerySpec& q,
                      const CommunitySet& composed) {
  q.validate(mln);

  // Needed features: group_by, report_on, then filters.
  std::vector<std::string> features = {q.group_by, q.report_on};
  for (const auto& f : q.filters) features.push_back(f.feature);
  std::vector<std::vector<const std::string*>> node_labels;
  for (const auto& feature : features)
    node_labels.push_back(layer_with_feature(mln, q, feature)->node_labels());

  std::map<std::string, std::map<std::string, std::uint64_t>> cells;
  auto tally = [&](auto&& label_of, std::uint64_t weight) {
    std::vector<const std::string*> values(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
      values[i] = label_of(i);
      if (!values[i]) return;
    }
    for (std::size_t i = 0; i < q.filters.size(); ++i)
      if (*values[2 + i] != q.filters[i].label) return;
    cells[*values[0]][*values[1]] += weight;
  };

  for (const auto& c : composed.communities) {
    tally(
        [&](std::size_t i) -> const std::string* {
          auto it = c.labels.find(features[i]);
          return it != c.labels.end() ? &it->second : node_labels[i][c.members.front()];
        },
        c.members.size());
  }
  for (NodeId u : composed.singletons)
    tally([&](std::size_t i) { return node_labels[i][u]; }, 1);

  QueryResult result;
  result.query = q.name;
  for (const auto& [group, counts] : cells) {
    std::uint64_t group_total = 0;
    for (const auto& [label, n] : counts) group_total += n;
    result.total_members += group_total;

    std::vector<QueryRow> rows;
    for (const auto& [label, n] : counts)
      rows.push_back({group, label, n,
                      100.0 * static_cast<double>(n) / static_cast<double>(group_total)});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const QueryRow& a, const QueryRow& b) { return a.count > b.count; });
    if (q.top_k > 0 && rows.size() > q.top_k) rows.resize(q.top_k);
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  return result;
}

QueryResult run_query(const MultilayerNetwork& mln, const QuerySpec& q, Engine engine,
                      const CommunityIndex* detected, const DetectOptions& options) {
  q.check_shape();
  CommunitySet composed;
  if (engine == Engine::eff) {
    if (!detected)
      throw Error(Errc::spec, fmt::format("query '{}': eff engine needs detected communities",
                                          q.name));
    std::vector<const CommunitySet*> sets;
    for (const auto& name : q.layers) {
      auto it = detected->find(name);
      if (it == detected->end())
        throw Error(Errc::spec, fmt::format("query '{}': no communities for layer '{}'", q.name,
                                            name));
      sets.push_back(&it->second);
    }
    // Refuses non-self-preserving inputs before any label lookup.
    composed = eff_comm(sets);
  } else {
    q.validate(mln);
    std::vector<const PartitionLayer*> layers;
    for (const auto& name : q.layers) layers.push_back(&mln.at(name));
    composed = naive_comm(layers, options);
  }
  return summarize(mln, q, composed);
}

std::vector<QuerySpec> canned_queries(const CannedLayers& n) {
  std::vector<QuerySpec> out;
  const std::vector<QueryFilter> us = {{n.locale, n.us_locale}};

  out.push_back({"Q1", {n.age, n.political, n.locale}, us, n.age, n.political, 3});
  out.push_back({"Q2a", {n.age, n.relationship, n.locale}, us, n.age, n.relationship, 3});
  for (const auto& t : n.traits)
    out.push_back({"Q2b_" + t, {n.gender, n.relationship, t}, {{t, "Yes"}}, n.gender,
                   n.relationship, 3});
  out.push_back({"Q3a", {n.traits[0], n.traits[4]}, {}, n.traits[0], n.traits[4], 0});
  for (const auto& t : n.traits) out.push_back({"Q3b_" + t, {t, n.age}, {}, n.age, t, 0});
  out.push_back({"Q4a", {n.age, n.privacy}, {}, n.age, n.privacy, 0});
  for (const auto& t : n.traits)
    out.push_back({"Q4b_" + t, {n.gender, n.privacy, t}, {{t, "Yes"}}, n.gender, n.privacy, 0});
  return out;
}

}  // namespace mln
