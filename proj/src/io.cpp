#include "mln/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mln/error.hpp"

namespace mln::io {
namespace {

template <class Fn>
auto guarded(std::string_view what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema, fmt::format("malformed {}: {}", what, e.what()));
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols))
    throw Error(Errc::shape, fmt::format("matrix data has {} entries for {}x{}", data.size(),
                                         rows, cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<double>();
  return m;
}

Json vector_json(const Eigen::VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string_view kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::categorical: return "categorical";
    case FeatureKind::binned: return "binned";
    case FeatureKind::derived: return "derived";
  }
  return "?";
}

}  // namespace

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema, fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw Error(Errc::io, fmt::format("failed writing {}", path.string()));
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

Json to_json(const PartitionLayer& layer) {
  Json groups = Json::object();
  for (const auto& [label, members] : layer.groups) groups[label] = members;
  return {{"name", layer.name},
          {"feature", layer.feature},
          {"node_count", layer.node_count},
          {"groups", groups}};
}

PartitionLayer layer_from_json(const Json& j) {
  PartitionLayer l = guarded("layer file", [&] {
    PartitionLayer l;
    l.name = j.at("name").get<std::string>();
    l.feature = j.value("feature", l.name);
    l.node_count = j.at("node_count").get<NodeId>();
    for (const auto& [label, members] : j.at("groups").items())
      l.groups[label] = members.get<std::vector<NodeId>>();
    return l;
  });
  l.normalize();
  l.validate();
  return l;
}

bool is_graph_layer(const Json& j) { return j.is_object() && j.contains("edges"); }

Json to_json(const GraphLayer& layer) {
  Json edges = Json::array();
  for (const auto& [u, v] : layer.graph.edges()) edges.push_back({u, v});
  return {{"name", layer.name}, {"node_count", layer.graph.node_count()}, {"edges", edges}};
}

GraphLayer graph_layer_from_json(const Json& j) {
  return guarded("graph layer file", [&] {
    GraphLayer g;
    g.name = j.at("name").get<std::string>();
    const auto n = j.at("node_count").get<NodeId>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2)
        throw Error(Errc::schema, "graph layer edges must be [u, v] pairs");
      edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
    }
    g.graph = Graph::from_edges(n, edges);
    return g;
  });
}

Json to_json(const CommunitySet& cs) {
  Json communities = Json::array();
  for (const auto& c : cs.communities)
    communities.push_back({{"id", c.id}, {"labels", c.labels}, {"members", c.members}});
  return {{"layers", cs.layer_names},
          {"node_count", cs.node_count},
          {"self_preserving", cs.self_preserving},
          {"communities", communities},
          {"singletons", cs.singletons}};
}

CommunitySet community_set_from_json(const Json& j) {
  CommunitySet cs = guarded("community file", [&] {
    CommunitySet cs;
    cs.layer_names = j.at("layers").get<std::vector<std::string>>();
    cs.node_count = j.at("node_count").get<NodeId>();
    cs.self_preserving = j.value("self_preserving", false);
    for (const auto& c : j.at("communities"))
      cs.communities.push_back({c.value("id", std::uint32_t{0}),
                                c.at("members").get<std::vector<NodeId>>(),
                                c.value("labels", std::map<std::string, std::string>{})});
    cs.singletons = j.at("singletons").get<std::vector<NodeId>>();
    return cs;
  });
  cs.canonicalize();
  cs.validate();
  return cs;
}

Json detection_summary(const std::string& layer, const DetectionReport& report) {
  std::size_t below_one = 0;
  for (const auto& icc : report.per_node_icc)
    if (icc && *icc < 1.0) ++below_one;
  return {{"layer", layer},
          {"communities", report.community_set.communities.size()},
          {"singletons", report.community_set.singletons.size()},
          {"self_preserving", report.self_preserving},
          {"min_icc", report.min_icc},
          {"nodes_with_icc_below_1", below_one}};
}

Json to_json(const QuerySpec& q) {
  Json filters = Json::array();
  for (const auto& f : q.filters) filters.push_back({{"feature", f.feature}, {"label", f.label}});
  return {{"name", q.name},
          {"layers", q.layers},
          {"filters", filters},
          {"group_by", q.group_by},
          {"report_on", q.report_on},
          {"top_k", q.top_k}};
}

QuerySpec query_spec_from_json(const Json& j) {
  return guarded("query spec", [&] {
    QuerySpec q;
    q.name = j.value("name", std::string{});
    q.layers = j.at("layers").get<std::vector<std::string>>();
    for (const auto& f : j.value("filters", Json::array()))
      q.filters.push_back({f.at("feature").get<std::string>(), f.at("label").get<std::string>()});
    q.group_by = j.at("group_by").get<std::string>();
    q.report_on = j.at("report_on").get<std::string>();
    q.top_k = j.value("top_k", std::size_t{3});
    return q;
  });
}

Json to_json(const QueryResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"group", row.group},
                    {"label", row.label},
                    {"count", row.count},
                    {"pct", row.percentage}});
  return {{"query", r.query}, {"total_members", r.total_members}, {"rows", rows}};
}

std::string to_csv(const QueryResult& r) {
  std::string out = "group,label,count,pct\n";
  for (const auto& row : r.rows)
    out += fmt::format("{},{},{},{:.4f}\n", csv_field(row.group), csv_field(row.label), row.count,
                       row.percentage);
  return out;
}

Json to_json(const TimingReport& r) {
  Json layers = Json::array();
  for (std::size_t i = 0; i < r.layer_names.size(); ++i)
    layers.push_back({{"layer", r.layer_names[i]},
                      {"detect_seconds", r.layer_detect_seconds[i]},
                      {"edges", r.layer_edges[i]},
                      {"communities", r.layer_communities[i]}});
  Json queries = Json::array();
  for (std::size_t i = 0; i < r.query_names.size(); ++i)
    queries.push_back({{"query", r.query_names[i]},
                       {"naive_compose_seconds", r.naive_compose_seconds[i]},
                       {"naive_detect_seconds", r.naive_detect_seconds[i]},
                       {"eff_seconds", r.eff_query_seconds[i]},
                       {"composed_edges", r.composed_edges[i]},
                       {"composed_communities", r.composed_communities[i]}});
  return {{"workers", r.workers},
          {"repetitions", r.repetitions},
          {"layers", layers},
          {"queries", queries},
          {"sequential_detect_total", r.sequential_detect_total},
          {"parallel_detect_wall", r.parallel_detect_wall},
          {"naive_total", r.naive_total},
          {"eff_queries_total", r.eff_queries_total},
          {"eff_total_sequential", r.eff_total_sequential},
          {"eff_total_parallel", r.eff_total_parallel},
          {"reduction_sequential_pct", r.reduction_sequential_pct},
          {"reduction_parallel_pct", r.reduction_parallel_pct},
          {"parallel_detect_reduction_pct", r.parallel_detect_reduction_pct}};
}

std::string to_csv(const TimingReport& r) {
  std::string out = "phase,item,seconds\n";
  auto row = [&](std::string_view phase, const std::string& item, double s) {
    out += fmt::format("{},{},{:.6f}\n", phase, csv_field(item), s);
  };
  for (std::size_t i = 0; i < r.layer_names.size(); ++i)
    row("layer_detect", r.layer_names[i], r.layer_detect_seconds[i]);
  for (std::size_t i = 0; i < r.query_names.size(); ++i) {
    row("naive_compose", r.query_names[i], r.naive_compose_seconds[i]);
    row("naive_detect", r.query_names[i], r.naive_detect_seconds[i]);
    row("eff_intersect", r.query_names[i], r.eff_query_seconds[i]);
  }
  row("total", "sequential_detect", r.sequential_detect_total);
  row("total", "parallel_detect_wall", r.parallel_detect_wall);
  row("total", "naive", r.naive_total);
  row("total", "eff_queries", r.eff_queries_total);
  row("total", "eff_sequential", r.eff_total_sequential);
  row("total", "eff_parallel", r.eff_total_parallel);
  return out;
}

DatasetSchema schema_from_json(const Json& j) {
  DatasetSchema s = guarded("schema", [&] {
    DatasetSchema s;
    s.id_column = j.at("id_column").get<std::string>();
    for (const auto& f : j.at("features")) {
      FeatureSpec spec;
      spec.name = f.at("name").get<std::string>();
      const auto kind = f.value("kind", std::string("categorical"));
      if (kind == "categorical") {
        spec.kind = FeatureKind::categorical;
      } else if (kind == "binned") {
        spec.kind = FeatureKind::binned;
        const auto& bins = f.at("bins");
        if (bins.is_string()) {
          if (bins.get<std::string>() != "age")
            throw Error(Errc::schema, fmt::format("unknown bin preset '{}'", bins.get<std::string>()));
          spec.bins = default_age_bins();
        } else {
          for (const auto& b : bins) {
            Bin bin{b.at("label").get<std::string>(), std::nullopt, std::nullopt};
            if (b.contains("lower") && !b["lower"].is_null()) bin.lower = b["lower"].get<double>();
            if (b.contains("upper") && !b["upper"].is_null()) bin.upper = b["upper"].get<double>();
            spec.bins.push_back(std::move(bin));
          }
        }
      } else if (kind == "derived") {
        spec.kind = FeatureKind::derived;
        spec.source = f.at("source").get<std::string>();
        spec.threshold = f.at("threshold").get<double>();
        spec.yes_label = f.value("yes", spec.yes_label);
        spec.no_label = f.value("no", spec.no_label);
      } else {
        throw Error(Errc::schema, fmt::format("feature '{}' has unknown kind '{}'", spec.name, kind));
      }
      s.features.push_back(std::move(spec));
    }
    return s;
  });
  s.validate();
  return s;
}

Json to_json(const DatasetSchema& s) {
  Json features = Json::array();
  for (const auto& f : s.features) {
    Json jf = {{"name", f.name}, {"kind", kind_name(f.kind)}};
    if (f.kind == FeatureKind::binned) {
      Json bins = Json::array();
      for (const auto& b : f.bins) {
        Json jb = {{"label", b.label}};
        jb["lower"] = b.lower ? Json(*b.lower) : Json(nullptr);
        jb["upper"] = b.upper ? Json(*b.upper) : Json(nullptr);
        bins.push_back(jb);
      }
      jf["bins"] = bins;
    } else if (f.kind == FeatureKind::derived) {
      jf["source"] = f.source;
      jf["threshold"] = f.threshold;
      jf["yes"] = f.yes_label;
      jf["no"] = f.no_label;
    }
    features.push_back(jf);
  }
  return {{"id_column", s.id_column}, {"features", features}};
}

Json to_json(const MlpModel& m) {
  return {{"w1", matrix_json(m.w1)}, {"b1", vector_json(m.b1)}, {"w2", matrix_json(m.w2)},
          {"b2", vector_json(m.b2)}, {"w3", matrix_json(m.w3)}, {"b3", vector_json(m.b3)}};
}

MlpModel mlp_from_json(const Json& j) {
  MlpModel m = guarded("model file", [&] {
    MlpModel m;
    m.w1 = matrix_from_json(j.at("w1"));
    m.b1 = vector_from_json(j.at("b1"));
    m.w2 = matrix_from_json(j.at("w2"));
    m.b2 = vector_from_json(j.at("b2"));
    m.w3 = matrix_from_json(j.at("w3"));
    m.b3 = vector_from_json(j.at("b3"));
    return m;
  });
  m.validate();
  return m;
}

Json to_json(const NgramVocabulary& v) {
  Json terms = Json::array();
  for (const auto& t : v.terms)
    terms.push_back({{"text", t.text}, {"n", t.n}, {"idf", t.idf}, {"score", t.score}});
  return {{"level", v.level == NgramLevel::word ? "word" : "character"},
          {"n_min", v.n_min},
          {"n_max", v.n_max},
          {"top_k", v.top_k},
          {"terms", terms}};
}

NgramVocabulary vocabulary_from_json(const Json& j) {
  NgramVocabulary v = guarded("vocabulary", [&] {
    NgramVocabulary v;
    v.level = j.at("level").get<std::string>() == "word" ? NgramLevel::word : NgramLevel::character;
    v.n_min = j.at("n_min").get<unsigned>();
    v.n_max = j.at("n_max").get<unsigned>();
    v.top_k = j.at("top_k").get<std::size_t>();
    for (const auto& t : j.at("terms"))
      v.terms.push_back({t.at("text").get<std::string>(), t.at("n").get<unsigned>(),
                         t.at("idf").get<double>(), t.at("score").get<double>()});
    return v;
  });
  v.rebuild_index();
  return v;
}

}  // namespace mln::io
