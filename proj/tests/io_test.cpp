#include <filesystem>

#include <gtest/gtest.h>

#include "mln/error.hpp"
#include "mln/io.hpp"
#include "support.hpp"

using namespace mln;

TEST(CommunityFile, RoundTrip) {
  testkit::Rng rng(1);
  const auto report = detect_layer(testkit::random_layer(rng, 60, 4, 0.2, "age"));
  const auto j = io::to_json(report.community_set);
  EXPECT_TRUE(j.at("self_preserving").get<bool>());
  const auto back = io::community_set_from_json(io::Json::parse(j.dump()));
  EXPECT_EQ(back, report.community_set);
}

TEST(CommunityFile, RejectsOverlap) {
  const auto j = io::Json::parse(
      R"({"layers":["x"],"node_count":3,"communities":[{"id":0,"members":[0,1]}],"singletons":[1,2]})");
  EXPECT_THROW(io::community_set_from_json(j), Error);
}

TEST(CommunityFile, MissingKeyIsSchemaError) {
  try {
    io::community_set_from_json(io::Json::parse(R"({"layers":[]})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::schema);
  }
}

TEST(GraphLayerFile, RoundTrip) {
  const io::GraphLayer g{"cycle", Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {0, 3}})};
  const auto j = io::to_json(g);
  EXPECT_TRUE(io::is_graph_layer(j));
  const auto back = io::graph_layer_from_json(j);
  EXPECT_EQ(back.graph, g.graph);
  EXPECT_EQ(back.name, "cycle");
}

TEST(QuerySpecFile, RoundTrip) {
  const QuerySpec q{"Q1", {"age", "political", "locale"}, {{"locale", "en_US"}}, "age", "political", 3};
  EXPECT_EQ(io::query_spec_from_json(io::to_json(q)), q);
}

TEST(QueryCsv, QuotesAwkwardLabels) {
  QueryResult r{"q", {{"a,b", "x\"y", 3, 100.0}}, 3};
  EXPECT_EQ(io::to_csv(r), "group,label,count,pct\n\"a,b\",\"x\"\"y\",3,100.0000\n");
}

TEST(SchemaFile, AgePresetAndExplicitBins) {
  const auto s = io::schema_from_json(io::Json::parse(R"({
    "id_column": "user_id",
    "features": [
      {"name": "age", "kind": "binned", "bins": "age"},
      {"name": "score", "kind": "binned", "bins": [{"label": "lo", "upper": 5}, {"label": "hi", "lower": 6}]},
      {"name": "opn", "kind": "derived", "source": "opn_score", "threshold": 3.8},
      {"name": "gender"}
    ]})"));
  ASSERT_EQ(s.features.size(), 4u);
  EXPECT_EQ(s.features[0].bins.size(), 6u);
  EXPECT_EQ(bin_value(s.features[1], 7), "hi");
  EXPECT_EQ(s.features[2].column(), "opn_score");
  const auto again = io::schema_from_json(io::to_json(s));
  EXPECT_EQ(io::to_json(again), io::to_json(s));
}

TEST(Files, MissingFileIsIoError) {
  try {
    io::read_json("/nonexistent/x.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io);
  }
}

TEST(Files, WriteIsByteStable) {
  const auto dir = std::filesystem::temp_directory_path() / "mln_io_test";
  const io::Json j = {{"b", 1}, {"a", {1.5, 2}}};
  io::write_json(dir / "x.json", j);
  const auto first = io::read_text(dir / "x.json");
  io::write_json(dir / "x.json", io::read_json(dir / "x.json"));
  EXPECT_EQ(io::read_text(dir / "x.json"), first);
  std::filesystem::remove_all(dir);
}
