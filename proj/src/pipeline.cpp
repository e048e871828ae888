#include "mln/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "mln/error.hpp"

namespace mln::pipeline {
namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::unordered_map<std::string, NodeId> index_keys(const std::vector<std::string>& keys) {
  std::unordered_map<std::string, NodeId> out;
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (!out.emplace(keys[i], static_cast<NodeId>(i)).second)
      throw Error(Errc::duplicate_record, fmt::format("id '{}' listed twice", keys[i]));
  return out;
}

NodeId lookup(const std::unordered_map<std::string, NodeId>& ids, std::string_view key,
              const fs::path& file, std::size_t row) {
  auto it = ids.find(std::string(key));
  if (it == ids.end())
    throw Error(Errc::value,
                fmt::format("{} row {}: unknown id '{}'", file.filename().string(), row, key));
  return it->second;
}

// Lines of "id<TAB>rest"; blank lines are skipped.
template <class Fn>
void read_tab_pairs(const fs::path& path, Fn&& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(Errc::value, fmt::format("{} row {}: expected id<TAB>value",
                                           path.filename().string(), row));
    fn(trim(std::string_view(line).substr(0, tab)), std::string_view(line).substr(tab + 1), row);
  }
}

}  // namespace

IngestOutput ingest(const fs::path& table, const DatasetSchema& schema, char delimiter) {
  auto in = open_input(table);
  IngestOutput out;
  out.data = load_records(in, schema, delimiter);
  for (const auto& f : schema.features) out.layers.push_back(generate_layer(out.data, f.name, schema));
  return out;
}

io::Json ids_to_json(const std::string& id_column, const std::vector<std::string>& keys) {
  return {{"id_column", id_column}, {"keys", keys}};
}

std::vector<std::string> keys_from_json(const io::Json& j) {
  try {
    auto keys = j.at("keys").get<std::vector<std::string>>();
    index_keys(keys);
    return keys;
  } catch (const io::Json::exception& e) {
    throw Error(Errc::schema, fmt::format("id file: {}", e.what()));
  }
}

Lexicons load_lexicons(const fs::path& dir) {
  Lexicons lex;
  auto in = open_input(dir / "positive.txt");
  lex.positive = load_word_list(in);
  in = open_input(dir / "negative.txt");
  lex.negative = load_word_list(in);
  in = open_input(dir / "negations.txt");
  lex.negations = load_word_list(in);
  return lex;
}

ContentOutput build_content(const ContentInputs& in) {
  const auto ids = index_keys(in.keys);
  const auto n = static_cast<NodeId>(in.keys.size());
  ContentOutput out;

  // Trait scores arrive as numeric columns named after the traits.
  DatasetSchema trait_schema{in.id_column, {}};
  for (auto t : kTraitNames) {
    FeatureSpec f;
    f.name = std::string(t);
    f.kind = FeatureKind::derived;
    f.source = std::string(t);
    trait_schema.features.push_back(f);
  }
  auto traits_in = open_input(in.traits);
  const Dataset traits = load_records(traits_in, trait_schema);
  std::vector<TraitScores> scores;
  for (std::size_t r = 0; r < traits.records.size(); ++r) {
    TraitScores s;
    s.user = lookup(ids, traits.keys[r], in.traits, r + 2);
    for (std::size_t i = 0; i < kTraitNames.size(); ++i) {
      const auto& v = traits.records[r].values.at(std::string(kTraitNames[i]));
      if (v) s.scores[i] = std::get<double>(*v);
    }
    scores.push_back(s);
  }
  out.trait_layers = build_trait_layers(scores, n, in.thresholds);

  std::map<NodeId, std::string> docs;
  read_tab_pairs(in.status, [&](std::string_view key, std::string_view text, std::size_t row) {
    auto& doc = docs[lookup(ids, key, in.status, row)];
    if (!doc.empty()) doc.push_back('\n');
    doc += text;
  });

  std::map<NodeId, PrivacyLabel> labels;
  read_tab_pairs(in.labels, [&](std::string_view key, std::string_view text, std::size_t row) {
    const auto label = parse_privacy_label(trim(text));
    if (!label)
      throw Error(Errc::value, fmt::format("{} row {}: unknown label '{}'",
                                           in.labels.filename().string(), row, trim(text)));
    if (!labels.emplace(lookup(ids, key, in.labels, row), *label).second)
      throw Error(Errc::duplicate_record, fmt::format("{} row {}: id '{}' labelled twice",
                                                      in.labels.filename().string(), row, key));
  });

  std::vector<std::string> corpus;
  std::vector<PrivacyLabel> targets;
  for (const auto& [user, label] : labels) {
    auto it = docs.find(user);
    if (it == docs.end()) continue;
    corpus.push_back(it->second);
    targets.push_back(label);
  }
  out.features.lexicons = load_lexicons(in.lexicons);
  out.features.words = fit_ngram_vocab(corpus, NgramLevel::word, in.n_min, in.n_max, in.top_k);
  out.features.chars = fit_ngram_vocab(corpus, NgramLevel::character, in.n_min, in.n_max, in.top_k);

  std::vector<Example> examples;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    examples.push_back({vectorize(corpus[i], out.features), targets[i]});
  auto trained = mlp_train(examples, in.train);
  out.model = std::move(trained.model);
  out.epoch_loss = std::move(trained.epoch_loss);
  out.train_examples = examples.size();

  std::size_t correct = 0;
  for (const auto& e : examples) correct += mlp_predict(out.model, e.x) == e.y;
  out.train_accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());

  std::map<NodeId, PrivacyLabel> predictions;
  for (const auto& [user, doc] : docs)
    predictions.emplace(user, mlp_predict(out.model, vectorize(doc, out.features)));
  out.predicted = predictions.size();
  out.privacy = build_privacy_layer(predictions, n);
  out.privacy.normalize();
  out.privacy.validate();
  return out;
}

std::vector<fs::path> json_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw Error(Errc::io, fmt::format("'{}' is not a directory", dir.string()));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

MultilayerNetwork load_layers(const fs::path& dir, std::vector<io::GraphLayer>* graphs) {
  MultilayerNetwork mln;
  bool sized = false;
  for (const auto& path : json_files(dir)) {
    const auto j = io::read_json(path);
    if (io::is_graph_layer(j)) {
      if (!graphs)
        throw Error(Errc::schema,
                    fmt::format("'{}' is an edge-list layer; expected a partition layer",
                                path.string()));
      graphs->push_back(io::graph_layer_from_json(j));
      continue;
    }
    auto layer = io::layer_from_json(j);
    if (!sized) {
      mln.node_count = layer.node_count;
      sized = true;
    }
    mln.add_layer(std::move(layer));
  }
  return mln;
}

CommunityIndex load_communities(const fs::path& dir) {
  CommunityIndex index;
  for (const auto& path : json_files(dir))
    index.emplace(path.stem().string(), io::community_set_from_json(io::read_json(path)));
  return index;
}

}  // namespace mln::pipeline
