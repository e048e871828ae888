#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mln/community.hpp"
#include "mln/content.hpp"
#include "mln/graph.hpp"
#include "mln/ingest.hpp"
#include "mln/io.hpp"
#include "mln/query.hpp"

// Stage functions behind the command-line tool. Each reads only the inputs it
// is handed, so stages can run and be tested in isolation.
namespace mln::pipeline {

namespace fs = std::filesystem;

struct IngestOutput {
  Dataset data;
  std::vector<PartitionLayer> layers;  // one per schema feature, in schema order
};

/// Loads the table and builds a layer per schema feature.
IngestOutput ingest(const fs::path& table, const DatasetSchema& schema, char delimiter = ',');

/// {"id_column", "keys": [...]} where keys[node] is the original id.
io::Json ids_to_json(const std::string& id_column, const std::vector<std::string>& keys);
std::vector<std::string> keys_from_json(const io::Json& j);

struct ContentInputs {
  fs::path traits;    // id column plus opn,con,ext,agr,neu scores
  fs::path status;    // id<TAB>text, any number of lines per person
  fs::path labels;    // id<TAB>LoPC|MePC|HiPC for the training subset
  fs::path lexicons;  // directory with positive.txt, negative.txt, negations.txt
  std::string id_column = "user_id";
  std::vector<std::string> keys;  // node universe from the ingest stage

  TraitThresholds thresholds;
  TrainOptions train;
  unsigned n_min = 1;
  unsigned n_max = 5;
  std::size_t top_k = 1000;
};

struct ContentOutput {
  std::vector<PartitionLayer> trait_layers;
  PartitionLayer privacy;
  FeaturePipeline features;
  MlpModel model;
  std::vector<double> epoch_loss;
  std::size_t train_examples = 0;
  double train_accuracy = 0.0;
  std::size_t predicted = 0;  // people with status text
};

/// Trait layers from the score table, and a privacy layer predicted by an MLP
/// trained on the labelled people's status text. People without text get no
/// privacy value.
ContentOutput build_content(const ContentInputs& in);

Lexicons load_lexicons(const fs::path& dir);

/// Every *.json layer file in `dir`, in file-name order. Partition layers go
/// into the network; edge-list layers (which carry no labels) into `graphs`
/// when given, and are rejected otherwise.
MultilayerNetwork load_layers(const fs::path& dir, std::vector<io::GraphLayer>* graphs = nullptr);

/// Community files keyed by file stem.
CommunityIndex load_communities(const fs::path& dir);

/// Sorted *.json files directly inside `dir`; io error when it is missing.
std::vector<fs::path> json_files(const fs::path& dir);

}  // namespace mln::pipeline
