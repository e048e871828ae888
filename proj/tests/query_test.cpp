#include <gtest/gtest.h>

#include "mln/compose.hpp"
#include "mln/error.hpp"
#include "mln/parallel.hpp"
#include "mln/query.hpp"
#include "support.hpp"

using namespace mln;
using namespace mln::testkit;

namespace {

MultilayerNetwork toy() {
  MultilayerNetwork mln;
  mln.node_count = 7;
  mln.add_layer({"age", "age", 7, {{"≤20", {1, 2, 3}}, {"21-30", {4, 5, 6}}}});
  mln.add_layer({"view", "view", 7, {{"dem", {1, 2, 5}}, {"rep", {3, 4, 6}}}});
  return mln;
}

PartitionLayer labelled(Rng& rng, NodeId n, const std::string& name,
                        const std::vector<std::string>& values, double missing) {
  PartitionLayer l{name, name, n, {}};
  std::bernoulli_distribution absent(missing);
  for (NodeId u = 0; u < n; ++u)
    if (!absent(rng)) l.groups[values[uniform(rng, 0, values.size() - 1)]].push_back(u);
  return l;
}

MultilayerNetwork canned_network(Rng& rng, NodeId n) {
  MultilayerNetwork mln;
  mln.node_count = n;
  mln.add_layer(labelled(rng, n, "age", {"≤20", "21-30", "31-40", "41-50", "51-60", "≥61"}, 0.05));
  mln.add_layer(labelled(rng, n, "gender", {"F", "M"}, 0.02));
  mln.add_layer(labelled(rng, n, "relationship", {"Single", "Married", "Engaged"}, 0.2));
  mln.add_layer(labelled(rng, n, "political", {"dem", "rep", "ind", "lib"}, 0.3));
  mln.add_layer(labelled(rng, n, "locale", {"en_US", "en_GB", "it_IT"}, 0.01));
  for (const auto* t : {"opn", "con", "ext", "agr", "neu"})
    mln.add_layer(labelled(rng, n, t, {"Yes", "No"}, 0.1));
  mln.add_layer(labelled(rng, n, "privacy", {"LoPC", "MePC", "HiPC"}, 0.0));
  return mln;
}

CommunityIndex detect_all(const MultilayerNetwork& mln) {
  const auto reports = detect_layers_serial(mln);
  return index_reports(mln, reports);
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::invalid_input;
}

}  // namespace

TEST(RunQuery, ToyDistribution) {
  const auto mln = toy();
  const auto index = detect_all(mln);
  const QuerySpec q{"toy", {"age", "view"}, {}, "age", "view", 0};
  const auto r = run_query(mln, q, Engine::eff, &index);
  ASSERT_EQ(r.rows.size(), 4u);
  // Groups in byte order: "21-30" sorts before the UTF-8 "≤".
  EXPECT_EQ(r.rows[0], (QueryRow{"21-30", "rep", 2, 200.0 / 3.0}));
  EXPECT_EQ(r.rows[1], (QueryRow{"21-30", "dem", 1, 100.0 / 3.0}));
  EXPECT_EQ(r.rows[2], (QueryRow{"≤20", "dem", 2, 200.0 / 3.0}));
  EXPECT_EQ(r.rows[3], (QueryRow{"≤20", "rep", 1, 100.0 / 3.0}));
  EXPECT_EQ(r.total_members, 6u);
  EXPECT_EQ(r, run_query(mln, q, Engine::naive));
}

TEST(RunQuery, FilterExcludingEverything) {
  const auto mln = toy();
  const auto index = detect_all(mln);
  const QuerySpec q{"none", {"age", "view"}, {{"view", "green"}}, "age", "view", 3};
  const auto r = run_query(mln, q, Engine::eff, &index);
  EXPECT_TRUE(r.rows.empty());
  EXPECT_EQ(r.total_members, 0u);
}

TEST(RunQuery, SpecErrors) {
  const auto mln = toy();
  EXPECT_EQ(code_of([&] { run_query(mln, {"q", {"age", "view"}, {}, "age", "age", 3}, Engine::naive); }),
            Errc::spec);
  EXPECT_EQ(code_of([&] { run_query(mln, {"q", {"age", "shoe"}, {}, "age", "view", 3}, Engine::naive); }),
            Errc::spec);
  EXPECT_EQ(code_of([&] { run_query(mln, {"q", {"age"}, {}, "age", "view", 3}, Engine::naive); }),
            Errc::spec);
  EXPECT_EQ(code_of([&] {
              run_query(mln, {"q", {"age", "view"}, {{"locale", "x"}}, "age", "view", 3},
                        Engine::naive);
            }),
            Errc::spec);
}

TEST(RunQuery, EffRefusesUnverifiedLayer) {
  const auto mln = toy();
  auto index = detect_all(mln);
  index.at("view").self_preserving = false;
  const QuerySpec q{"q", {"age", "view"}, {}, "age", "view", 3};
  EXPECT_EQ(code_of([&] { run_query(mln, q, Engine::eff, &index); }), Errc::precondition);
}

TEST(RunQuery, TopKTruncatesRowsButNotShares) {
  Rng rng(2);
  const auto mln = canned_network(rng, 300);
  const auto index = detect_all(mln);
  QuerySpec q{"q", {"age", "political"}, {}, "age", "political", 0};
  const auto full = run_query(mln, q, Engine::eff, &index);
  q.top_k = 2;
  const auto top = run_query(mln, q, Engine::eff, &index);
  EXPECT_EQ(top.total_members, full.total_members);
  for (const auto& row : top.rows)
    EXPECT_NE(std::find(full.rows.begin(), full.rows.end(), row), full.rows.end());
  std::map<std::string, int> per_group;
  for (const auto& row : top.rows) ++per_group[row.group];
  for (const auto& [g, count] : per_group) EXPECT_LE(count, 2);
}

TEST(CannedQueries, Shape) {
  const auto qs = canned_queries();
  ASSERT_EQ(qs.size(), 19u);
  std::size_t layers = 0;
  for (const auto& q : qs) layers += q.layers.size();
  EXPECT_EQ(layers, 50u);  // 3+3+15+2+10+2+15
  const auto q3a = std::find_if(qs.begin(), qs.end(), [](const QuerySpec& q) { return q.name == "Q3a"; });
  ASSERT_NE(q3a, qs.end());
  EXPECT_EQ(std::set<std::string>(q3a->layers.begin(), q3a->layers.end()),
            (std::set<std::string>{"opn", "neu"}));
  EXPECT_EQ(qs[0].filters, (std::vector<QueryFilter>{{"locale", "en_US"}}));
}

TEST(CannedQueries, FollowLayerNames) {
  CannedLayers names;
  names.age = "L1";
  names.privacy = "L11";
  const auto qs = canned_queries(names);
  EXPECT_EQ(qs[0].layers[0], "L1");
  EXPECT_EQ(qs.back().layers[1], "L11");
}

TEST(CannedQueries, EnginesAgreeAndSharesClose) {
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    const auto mln = canned_network(rng, static_cast<NodeId>(uniform(rng, 50, 400)));
    const auto index = detect_all(mln);
    const auto qs = canned_queries();
    for (const auto& q : qs) {
      auto all = q;
      all.top_k = 0;
      const auto eff = run_query(mln, all, Engine::eff, &index);
      EXPECT_EQ(eff, run_query(mln, all, Engine::naive)) << q.name;
      std::map<std::string, double> sums;
      for (const auto& row : eff.rows) sums[row.group] += row.percentage;
      for (const auto& [g, s] : sums) EXPECT_NEAR(s, 100.0, 0.01) << q.name << " " << g;
    }
  }
}

TEST(CannedQueries, FilterSoundness) {
  Rng rng(4);
  const auto mln = canned_network(rng, 300);
  const auto index = detect_all(mln);
  for (const auto& q : canned_queries()) {
    if (q.filters.empty()) continue;
    std::vector<const CommunitySet*> sets;
    for (const auto& l : q.layers) sets.push_back(&index.at(l));
    const auto composed = eff_comm(sets);
    const auto r = summarize(mln, q, composed);
    // Recount from raw per-node values: members satisfying every filter and
    // carrying both reported features.
    std::vector<std::vector<const std::string*>> vals;
    for (const auto* f : {&q.group_by, &q.report_on}) vals.push_back(mln.at(*f).node_labels());
    std::uint64_t expected = 0;
    for (NodeId u = 0; u < mln.node_count; ++u) {
      bool ok = vals[0][u] && vals[1][u];
      for (const auto& f : q.filters) {
        const auto* v = mln.at(f.feature).node_labels()[u];
        ok = ok && v && *v == f.label;
      }
      expected += ok;
    }
    EXPECT_EQ(r.total_members, expected) << q.name;
  }
}

TEST(RunQueries, ParallelMatchesSerial) {
  Rng rng(5);
  const auto mln = canned_network(rng, 250);
  const auto index = detect_all(mln);
  const auto qs = canned_queries();
  EXPECT_EQ(run_queries_parallel(mln, qs, Engine::eff, &index, {}, 4),
            run_queries_serial(mln, qs, Engine::eff, &index));
}
