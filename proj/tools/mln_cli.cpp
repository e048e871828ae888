// mln: batch driver for the layer / community / query pipeline.
//
//   mln ingest  --data users.csv --schema schema.json
//   mln content --traits traits.csv --status status.tsv --labels labels.tsv --lexicons dir
//   mln detect
//   mln query   --canned --engine both
//   mln compose --layers age,gender
//   mln bench
//
// Stages hand off through JSON files under --out-dir.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mln/bench.hpp"
#include "mln/compose.hpp"
#include "mln/error.hpp"
#include "mln/io.hpp"
#include "mln/parallel.hpp"
#include "mln/pipeline.hpp"
#include "mln/query.hpp"

namespace {

namespace fs = std::filesystem;
using mln::Errc;
using mln::Error;
using mln::io::Json;

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kSchema = 4,
  kSpec = 5,
  kPrecondition = 6,
  kMismatch = 7,
  kData = 8,
  kParameter = 9,
};

int exit_code(Errc code) {
  switch (code) {
    case Errc::io: return kIo;
    case Errc::schema: return kSchema;
    case Errc::spec: return kSpec;
    case Errc::precondition: return kPrecondition;
    case Errc::mismatch: return kMismatch;
    case Errc::parameter:
    case Errc::training:
    case Errc::fit: return kParameter;
    case Errc::invalid_partition:
    case Errc::out_of_range:
    case Errc::duplicate_record:
    case Errc::value:
    case Errc::arity:
    case Errc::universe:
    case Errc::shape:
    case Errc::invalid_input: return kData;
  }
  return kInternal;
}

struct Global {
  std::uint64_t seed = 1;
  int workers = 0;
  fs::path out_dir = "out";
  std::string format = "json";

  fs::path dir(const char* name) const { return out_dir / name; }
  fs::path or_default(const fs::path& given, const char* name) const {
    return given.empty() ? dir(name) : given;
  }
};

enum class EngineChoice { eff, naive, both };

EngineChoice parse_engine(const std::string& s) {
  if (s == "eff") return EngineChoice::eff;
  if (s == "naive") return EngineChoice::naive;
  return EngineChoice::both;
}

std::string joined(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out.push_back(sep);
    out += p;
  }
  return out;
}

char delimiter_for(const std::string& flag, const fs::path& file) {
  if (flag == "tab" || flag == "\\t") return '\t';
  if (flag.size() == 1) return flag[0];
  if (!flag.empty()) throw Error(Errc::parameter, fmt::format("bad delimiter '{}'", flag));
  return file.extension() == ".tsv" ? '\t' : ',';
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  fs::path data;
  fs::path schema;
  std::string delimiter;
};

void cmd_ingest(const Global& g, const IngestArgs& a) {
  const auto schema = mln::io::schema_from_json(mln::io::read_json(a.schema));
  const auto out = mln::pipeline::ingest(a.data, schema, delimiter_for(a.delimiter, a.data));
  for (const auto& layer : out.layers)
    mln::io::write_json(g.dir("layers") / (layer.name + ".json"), mln::io::to_json(layer));
  mln::io::write_json(g.out_dir / "ids.json",
                      mln::pipeline::ids_to_json(schema.id_column, out.data.keys));
  fmt::print("ingest: {} people, {} layers\n", out.data.node_count(), out.layers.size());
}

// ---- content --------------------------------------------------------------

struct ContentArgs {
  mln::pipeline::ContentInputs in;
  fs::path ids;
  std::vector<double> thresholds;
};

void cmd_content(const Global& g, ContentArgs a) {
  const auto ids = mln::io::read_json(g.or_default(a.ids, "ids.json"));
  a.in.keys = mln::pipeline::keys_from_json(ids);
  if (ids.contains("id_column")) a.in.id_column = ids["id_column"].get<std::string>();
  if (!a.thresholds.empty()) {
    if (a.thresholds.size() != 5)
      throw Error(Errc::parameter, "--thresholds takes five values (opn con ext agr neu)");
    std::copy(a.thresholds.begin(), a.thresholds.end(), a.in.thresholds.means.begin());
  }
  a.in.train.seed = g.seed;

  const auto out = mln::pipeline::build_content(a.in);
  for (const auto& layer : out.trait_layers)
    mln::io::write_json(g.dir("layers") / (layer.name + ".json"), mln::io::to_json(layer));
  mln::io::write_json(g.dir("layers") / (out.privacy.name + ".json"),
                      mln::io::to_json(out.privacy));
  mln::io::write_json(g.dir("models") / "privacy_mlp.json", mln::io::to_json(out.model));
  mln::io::write_json(g.dir("models") / "word_vocab.json", mln::io::to_json(out.features.words));
  mln::io::write_json(g.dir("models") / "char_vocab.json", mln::io::to_json(out.features.chars));

  Json thresholds = Json::object();
  for (std::size_t i = 0; i < mln::kTraitNames.size(); ++i)
    thresholds[std::string(mln::kTraitNames[i])] = a.in.thresholds.means[i];
  Json report = {{"train_examples", out.train_examples},
                 {"train_accuracy", out.train_accuracy},
                 {"final_loss", out.epoch_loss.empty() ? 0.0 : out.epoch_loss.back()},
                 {"epochs", out.epoch_loss.size()},
                 {"input_dimension", out.features.dimension()},
                 {"predicted", out.predicted},
                 {"thresholds", thresholds}};
  mln::io::write_json(g.dir("reports") / "content.json", report);
  fmt::print("content: {} trait layers, privacy predicted for {} people (train accuracy {:.3f})\n",
             out.trait_layers.size(), out.predicted, out.train_accuracy);
}

// ---- detect ---------------------------------------------------------------

struct DetectArgs {
  fs::path layers_dir;
  std::string method = "map";
  std::uint32_t passes = 20;
  bool timing = false;
};

mln::DetectOptions detect_options(const Global& g, const std::string& method,
                                  std::uint32_t passes) {
  mln::DetectOptions o;
  o.method = method == "components" ? mln::DetectMethod::components
                                    : mln::DetectMethod::map_equation;
  o.seed = g.seed;
  o.passes = passes;
  return o;
}

void cmd_detect(const Global& g, const DetectArgs& a) {
  std::vector<mln::io::GraphLayer> graphs;
  const auto mln = mln::pipeline::load_layers(g.or_default(a.layers_dir, "layers"), &graphs);
  const auto options = detect_options(g, a.method, a.passes);

  std::vector<std::pair<std::string, mln::DetectionReport>> results;
  const auto start = std::chrono::steady_clock::now();
  auto reports = mln::detect_layers_parallel(mln, options, g.workers);
  for (std::size_t i = 0; i < reports.size(); ++i)
    results.emplace_back(mln.layers[i].name, std::move(reports[i]));
  for (const auto& gl : graphs)
    results.emplace_back(gl.name, mln::detect_graph(gl.graph, gl.name, options));
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  std::sort(results.begin(), results.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  Json summary = Json::array();
  Json timing = {{"workers", g.workers == 0 ? mln::default_workers() : g.workers},
                 {"wall_seconds", wall.count()},
                 {"layers", Json::object()}};
  std::size_t refused = 0;
  for (const auto& [name, report] : results) {
    mln::io::write_json(g.dir("communities") / (name + ".json"),
                        mln::io::to_json(report.community_set));
    summary.push_back(mln::io::detection_summary(name, report));
    timing["layers"][name] = report.wall_time.count();
    refused += !report.self_preserving;
  }
  mln::io::write_json(g.dir("reports") / "detect.json", summary);
  if (a.timing) mln::io::write_json(g.dir("reports") / "detect_timing.json", timing);
  fmt::print("detect: {} layers, {} not self-preserving\n", results.size(), refused);
}

// ---- compose --------------------------------------------------------------

struct ComposeArgs {
  std::vector<std::string> layers;
  std::string engine = "eff";
  std::string name;
  fs::path layers_dir;
  fs::path communities_dir;
  std::string method = "map";
  std::uint32_t passes = 20;
};

void cmd_compose(const Global& g, const ComposeArgs& a) {
  if (a.layers.size() < 2) throw Error(Errc::arity, "compose needs at least two layers");
  const auto engine = parse_engine(a.engine);
  std::optional<mln::CommunitySet> eff, naive;

  if (engine != EngineChoice::naive) {
    const auto index = mln::pipeline::load_communities(g.or_default(a.communities_dir, "communities"));
    std::vector<const mln::CommunitySet*> sets;
    for (const auto& l : a.layers) {
      auto it = index.find(l);
      if (it == index.end())
        throw Error(Errc::spec, fmt::format("no community file for layer '{}'", l));
      sets.push_back(&it->second);
    }
    eff = mln::eff_comm(sets);
  }
  if (engine != EngineChoice::eff) {
    const auto mln = mln::pipeline::load_layers(g.or_default(a.layers_dir, "layers"));
    std::vector<const mln::PartitionLayer*> layers;
    for (const auto& l : a.layers) layers.push_back(&mln.at(l));
    naive = mln::naive_comm(layers, detect_options(g, a.method, a.passes));
  }
  if (eff && naive && !eff->same_partition(*naive))
    throw Error(Errc::mismatch, fmt::format("eff and naive disagree on {}", joined(a.layers, '+')));

  const auto& result = eff ? *eff : *naive;
  const std::string name = a.name.empty() ? joined(a.layers, '+') : a.name;
  mln::io::write_json(g.dir("compositions") / (name + ".json"), mln::io::to_json(result));
  fmt::print("compose: {} -> {} communities, {} singletons\n", name, result.communities.size(),
             result.singletons.size());
}

// ---- query ----------------------------------------------------------------

struct QueryArgs {
  fs::path spec;
  bool canned = false;
  std::string engine = "eff";
  fs::path layers_dir;
  fs::path communities_dir;
  std::vector<std::string> renames;  // role=layer for the canned set
  std::string method = "map";
  std::uint32_t passes = 20;
};

mln::CannedLayers canned_names(const std::vector<std::string>& renames) {
  mln::CannedLayers n;
  std::map<std::string, std::string*> roles = {
      {"age", &n.age},           {"gender", &n.gender},     {"relationship", &n.relationship},
      {"political", &n.political}, {"locale", &n.locale},   {"privacy", &n.privacy},
      {"us_locale", &n.us_locale}};
  for (std::size_t i = 0; i < n.traits.size(); ++i)
    roles.emplace(std::string(mln::kTraitNames[i]), &n.traits[i]);
  for (const auto& r : renames) {
    const auto eq = r.find('=');
    auto it = eq == std::string::npos ? roles.end() : roles.find(r.substr(0, eq));
    if (it == roles.end())
      throw Error(Errc::parameter, fmt::format("bad --canned-layer '{}': expected role=layer", r));
    *it->second = r.substr(eq + 1);
  }
  return n;
}

void cmd_query(const Global& g, const QueryArgs& a) {
  std::vector<mln::QuerySpec> queries;
  if (!a.spec.empty()) {
    const auto j = mln::io::read_json(a.spec);
    if (j.is_array())
      for (const auto& q : j) queries.push_back(mln::io::query_spec_from_json(q));
    else
      queries.push_back(mln::io::query_spec_from_json(j));
  }
  if (a.canned || a.spec.empty()) {
    auto canned = mln::canned_queries(canned_names(a.renames));
    queries.insert(queries.end(), canned.begin(), canned.end());
  }
  if (g.format != "json" && g.format != "csv")
    throw Error(Errc::parameter, fmt::format("unknown format '{}'", g.format));

  const auto engine = parse_engine(a.engine);
  const auto options = detect_options(g, a.method, a.passes);
  // Edge-list layers carry no labels; eff still sees their communities and
  // refuses them when they are not self-preserving.
  std::vector<mln::io::GraphLayer> unlabelled;
  const auto mln = mln::pipeline::load_layers(g.or_default(a.layers_dir, "layers"), &unlabelled);

  std::vector<mln::QueryResult> results;
  if (engine != EngineChoice::naive) {
    const auto index = mln::pipeline::load_communities(g.or_default(a.communities_dir, "communities"));
    results = mln::run_queries_parallel(mln, queries, mln::Engine::eff, &index, options, g.workers);
  }
  if (engine != EngineChoice::eff) {
    auto naive = mln::run_queries_parallel(mln, queries, mln::Engine::naive, nullptr, options,
                                           g.workers);
    if (!results.empty()) {
      for (std::size_t i = 0; i < queries.size(); ++i)
        if (!(results[i] == naive[i]))
          throw Error(Errc::mismatch,
                      fmt::format("eff and naive disagree on query '{}'", queries[i].name));
    } else {
      results = std::move(naive);
    }
  }

  for (const auto& r : results) {
    const auto path = g.dir("queries") / (r.query + "." + g.format);
    if (g.format == "csv")
      mln::io::write_text(path, mln::io::to_csv(r));
    else
      mln::io::write_json(path, mln::io::to_json(r));
  }
  fmt::print("query: {} results written to {}\n", results.size(), g.dir("queries").string());
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  mln::Workload workload;
  std::size_t repetitions = 3;
  std::string engine = "both";
  std::string method = "map";
  std::uint32_t passes = 20;
};

void cmd_bench(const Global& g, BenchArgs a) {
  if (a.engine != "both")
    throw Error(Errc::parameter, "bench always times both engines; use --engine both");
  if (g.format != "json" && g.format != "csv")
    throw Error(Errc::parameter, fmt::format("unknown format '{}'", g.format));
  a.workload.seed = g.seed;
  const auto w = mln::generate_workload(a.workload);
  mln::BenchOptions options;
  options.workers = g.workers;
  options.repetitions = a.repetitions;
  options.detect = detect_options(g, a.method, a.passes);
  const auto r = mln::run_benchmark(w.mln, w.queries, options);

  const auto path = g.dir("reports") / ("bench." + g.format);
  if (g.format == "csv")
    mln::io::write_text(path, mln::io::to_csv(r));
  else
    mln::io::write_json(path, mln::io::to_json(r));
  fmt::print("bench: naive {:.3f}s, eff {:.3f}s sequential / {:.3f}s on {} workers "
             "({:.1f}% / {:.1f}% less)\n",
             r.naive_total, r.eff_total_sequential, r.eff_total_parallel, r.workers,
             r.reduction_sequential_pct, r.reduction_parallel_pct);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilayer network layers, communities and compositional queries"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  std::string out_dir = g.out_dir.string();
  app.add_option("--seed", g.seed, "Seed for detection, training and workloads")
      ->envname("MLN_SEED");
  app.add_option("--workers", g.workers, "Worker threads (0 = all cores)")->envname("MLN_WORKERS");
  app.add_option("--out-dir", out_dir, "Root of all stage outputs")->envname("MLN_OUT_DIR");
  app.add_option("--format", g.format, "Result format for query and bench")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname("MLN_FORMAT");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build one layer per schema feature");
  ingest_cmd->add_option("--data", ingest.data, "Delimited table with a header row")
      ->required()->envname("MLN_DATA");
  ingest_cmd->add_option("--schema", ingest.schema, "Schema JSON")->required()->envname("MLN_SCHEMA");
  ingest_cmd->add_option("--delimiter", ingest.delimiter, "Single character or 'tab'");

  ContentArgs content;
  auto* content_cmd = app.add_subcommand("content", "Trait layers and the predicted privacy layer");
  content_cmd->add_option("--traits", content.in.traits, "Trait score table")->required();
  content_cmd->add_option("--status", content.in.status, "id<TAB>status text")->required();
  content_cmd->add_option("--labels", content.in.labels, "id<TAB>privacy label")->required();
  content_cmd->add_option("--lexicons", content.in.lexicons, "Lexicon directory")->required();
  content_cmd->add_option("--ids", content.ids, "Id file from ingest (default <out>/ids.json)");
  content_cmd->add_option("--thresholds", content.thresholds, "Five trait means")->expected(5);
  content_cmd->add_option("--hidden1", content.in.train.hidden1);
  content_cmd->add_option("--hidden2", content.in.train.hidden2);
  content_cmd->add_option("--lr", content.in.train.learning_rate);
  content_cmd->add_option("--epochs", content.in.train.epochs);
  content_cmd->add_option("--batch", content.in.train.batch_size);
  content_cmd->add_option("--ngram-max", content.in.n_max, "Largest n for word and char n-grams");
  content_cmd->add_option("--top-k", content.in.top_k, "Terms kept per n");

  DetectArgs detect;
  auto* detect_cmd = app.add_subcommand("detect", "Communities and self-preserving check per layer");
  detect_cmd->add_option("--layers-dir", detect.layers_dir)->envname("MLN_LAYERS_DIR");
  detect_cmd->add_option("--method", detect.method)->check(CLI::IsMember({"map", "components"}));
  detect_cmd->add_option("--passes", detect.passes);
  detect_cmd->add_flag("--timing", detect.timing, "Also write reports/detect_timing.json");

  ComposeArgs compose;
  auto* compose_cmd = app.add_subcommand("compose", "AND-compose layers");
  compose_cmd->add_option("--layers", compose.layers, "Layer names")->required()->delimiter(',');
  compose_cmd->add_option("--engine", compose.engine)
      ->check(CLI::IsMember({"eff", "naive", "both"}))->envname("MLN_ENGINE");
  compose_cmd->add_option("--name", compose.name, "Output name (default a+b+...)");
  compose_cmd->add_option("--layers-dir", compose.layers_dir)->envname("MLN_LAYERS_DIR");
  compose_cmd->add_option("--communities-dir", compose.communities_dir)
      ->envname("MLN_COMMUNITIES_DIR");
  compose_cmd->add_option("--method", compose.method)->check(CLI::IsMember({"map", "components"}));
  compose_cmd->add_option("--passes", compose.passes);

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "Run query specs (the canned set by default)");
  query_cmd->add_option("--spec", query.spec, "Query spec JSON (object or array)");
  query_cmd->add_flag("--canned", query.canned, "Run the nineteen canned queries");
  query_cmd->add_option("--canned-layer", query.renames, "role=layer renames for canned queries");
  query_cmd->add_option("--engine", query.engine)
      ->check(CLI::IsMember({"eff", "naive", "both"}))->envname("MLN_ENGINE");
  query_cmd->add_option("--layers-dir", query.layers_dir)->envname("MLN_LAYERS_DIR");
  query_cmd->add_option("--communities-dir", query.communities_dir)
      ->envname("MLN_COMMUNITIES_DIR");
  query_cmd->add_option("--method", query.method)->check(CLI::IsMember({"map", "components"}));
  query_cmd->add_option("--passes", query.passes);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time eff against naive on a synthetic workload");
  bench_cmd->add_option("--layers", bench.workload.layers, "M");
  bench_cmd->add_option("--queries", bench.workload.queries, "N");
  bench_cmd->add_option("--k", bench.workload.layers_per_query, "Layers per query");
  bench_cmd->add_option("--nodes", bench.workload.nodes, "n");
  bench_cmd->add_option("--groups", bench.workload.groups, "Values per layer");
  bench_cmd->add_option("--zipf", bench.workload.zipf, "Group-size exponent");
  bench_cmd->add_option("--reps", bench.repetitions, "Repetitions per timing");
  bench_cmd->add_option("--engine", bench.engine)->check(CLI::IsMember({"both"}));
  bench_cmd->add_option("--method", bench.method)->check(CLI::IsMember({"map", "components"}));
  bench_cmd->add_option("--passes", bench.passes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  g.out_dir = out_dir;

  try {
    if (g.workers < 0) throw Error(Errc::parameter, "--workers must be >= 0");
    if (*ingest_cmd) cmd_ingest(g, ingest);
    else if (*content_cmd) cmd_content(g, content);
    else if (*detect_cmd) cmd_detect(g, detect);
    else if (*compose_cmd) cmd_compose(g, compose);
    else if (*query_cmd) cmd_query(g, query);
    else if (*bench_cmd) cmd_bench(g, bench);
    return kOk;
  } catch (const Error& e) {
    std::cerr << fmt::format("mln: {} error: {}\n", mln::to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << fmt::format("mln: error: {}\n", e.what());
    return kInternal;
  }
}
