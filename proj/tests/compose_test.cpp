#include <gtest/gtest.h>

#include "mln/compose.hpp"
#include "mln/error.hpp"
#include "support.hpp"

using namespace mln;
using namespace mln::testkit;

namespace {

// Node ids 1..6 as in the worked example; node 0 is an extra isolated node.
Graph graph_a() { return Graph::from_edges(7, std::vector<Edge>{{1, 2}, {1, 3}, {2, 3}, {4, 5}, {4, 6}, {5, 6}}); }
Graph graph_b() { return Graph::from_edges(7, std::vector<Edge>{{1, 2}, {1, 5}, {2, 5}, {3, 4}, {3, 6}, {4, 6}}); }

PartitionLayer layer_a() { return {"A", "a", 7, {{"x", {1, 2, 3}}, {"y", {4, 5, 6}}}}; }
PartitionLayer layer_b() { return {"B", "b", 7, {{"p", {1, 2, 5}}, {"q", {3, 4, 6}}}}; }

CommunitySet detected(const PartitionLayer& l) { return detect_layer(l).community_set; }

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::invalid_input;
}

std::vector<std::vector<NodeId>> members(const CommunitySet& cs) {
  std::vector<std::vector<NodeId>> out;
  for (const auto& c : cs.communities) out.push_back(c.members);
  return out;
}

}  // namespace

TEST(IntersectMembers, Examples) {
  using V = std::vector<NodeId>;
  EXPECT_EQ(intersect_members(V{1, 2, 3}, V{2, 3, 9}), (V{2, 3}));
  EXPECT_EQ(intersect_members(V{1, 2, 3}, V{}), V{});
  EXPECT_EQ(intersect_members(V{1, 2, 5}, V{3, 4, 6}), V{});
}

TEST(AndCompose, WorkedExample) {
  const std::vector<Graph> gs = {graph_a(), graph_b()};
  EXPECT_EQ(and_compose_graphs(gs).edges(), (std::vector<Edge>{{1, 2}, {4, 6}}));
}

TEST(AndCompose, IdempotentAndAnnihilatedByEmpty) {
  const std::vector<Graph> same = {graph_a(), graph_a()};
  EXPECT_EQ(and_compose_graphs(same), graph_a());
  const std::vector<Graph> empty = {graph_a(), Graph(7)};
  EXPECT_EQ(and_compose_graphs(empty).edge_count(), 0u);
}

TEST(AndCompose, Errors) {
  const std::vector<Graph> one = {graph_a()};
  EXPECT_EQ(code_of([&] { and_compose_graphs(one); }), Errc::arity);
  const std::vector<Graph> mixed = {graph_a(), Graph(8)};
  EXPECT_EQ(code_of([&] { and_compose_graphs(mixed); }), Errc::universe);
}

TEST(AndCompose, MatchesPairwiseOracle) {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const NodeId n = static_cast<NodeId>(uniform(rng, 2, 80));
    std::vector<PartitionLayer> ls;
    std::vector<Graph> gs;
    for (std::size_t k = uniform(rng, 2, 4); k > 0; --k) {
      ls.push_back(random_layer(rng, n, uniform(rng, 1, 5), 0.1));
      gs.push_back(materialize(ls.back()));
    }
    const auto got = and_compose_graphs(gs).edges();
    EXPECT_EQ(std::set<Edge>(got.begin(), got.end()), brute_and_edges(ls));
  }
}

TEST(ExperimentalCompose, OrAndNot) {
  const std::vector<Graph> gs = {graph_a(), graph_b()};
  const Graph g_or = experimental::or_compose_graphs(gs);
  EXPECT_EQ(g_or.edge_count(), 10u);
  const Graph g_not = experimental::and_not_compose_graphs(graph_a(), graph_b());
  EXPECT_EQ(g_not.edges(), (std::vector<Edge>{{1, 3}, {2, 3}, {4, 5}, {5, 6}}));
}

TEST(NaiveComm, WorkedExample) {
  const std::vector<Graph> gs = {graph_a(), graph_b()};
  const auto cs = naive_comm(gs, {}, true);
  EXPECT_EQ(members(cs), (std::vector<std::vector<NodeId>>{{1, 2}, {4, 6}}));
  EXPECT_EQ(cs.singletons, (std::vector<NodeId>{0, 3, 5}));
}

TEST(NaiveComm, IdenticalLayersKeepTheirCommunities) {
  const std::vector<Graph> gs = {graph_a(), graph_a()};
  EXPECT_TRUE(naive_comm(gs).same_partition(detect_components(graph_a())));
}

TEST(NaiveComm, DisjointPartitionsGiveNoCommunities) {
  PartitionLayer rows{"r", "r", 4, {{"0", {0, 1}}, {"1", {2, 3}}}};
  PartitionLayer cols{"c", "c", 4, {{"0", {0, 2}}, {"1", {1, 3}}}};
  const PartitionLayer* ls[] = {&rows, &cols};
  const auto cs = naive_comm(ls);
  EXPECT_TRUE(cs.communities.empty());
  EXPECT_EQ(cs.singletons.size(), 4u);
}

TEST(EffComm, WorkedExample) {
  const std::vector<CommunitySet> sets = {detected(layer_a()), detected(layer_b())};
  const auto cs = eff_comm(sets);
  EXPECT_EQ(members(cs), (std::vector<std::vector<NodeId>>{{1, 2}, {4, 6}}));
  EXPECT_EQ(cs.singletons, (std::vector<NodeId>{0, 3, 5}));
  EXPECT_EQ(cs.communities[0].labels, (std::map<std::string, std::string>{{"a", "x"}, {"b", "p"}}));
  EXPECT_EQ(cs.communities[1].labels, (std::map<std::string, std::string>{{"a", "y"}, {"b", "q"}}));
  EXPECT_EQ(cs.layer_names, (std::vector<std::string>{"A", "B"}));
}

TEST(EffComm, Idempotent) {
  const auto a = detected(layer_a());
  const std::vector<CommunitySet> sets = {a, a};
  EXPECT_TRUE(eff_comm(sets).same_partition(a));
}

TEST(EffComm, RefusesUnverifiedSets) {
  auto a = detected(layer_a());
  a.self_preserving = false;
  const std::vector<CommunitySet> sets = {a, detected(layer_b())};
  EXPECT_EQ(code_of([&] { eff_comm(sets); }), Errc::precondition);
  const std::vector<CommunitySet> one = {detected(layer_b())};
  EXPECT_EQ(code_of([&] { eff_comm(one); }), Errc::arity);
}

TEST(EffComm, RefusesFourCycleLayer) {
  const Graph cycle = Graph::from_edges(7, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const auto bad = detect_graph(cycle, "cycle");
  EXPECT_FALSE(bad.self_preserving);
  const std::vector<CommunitySet> sets = {bad.community_set, detected(layer_a())};
  EXPECT_EQ(code_of([&] { eff_comm(sets); }), Errc::precondition);
}

TEST(EffComm, EqualsNaiveAndReferenceOnRandomLayers) {
  Rng rng(41);
  for (int t = 0; t < 60; ++t) {
    const NodeId n = static_cast<NodeId>(uniform(rng, 1, 150));
    const std::size_t k = uniform(rng, 2, 4);
    std::vector<PartitionLayer> ls;
    std::vector<CommunitySet> sets;
    for (std::size_t i = 0; i < k; ++i) {
      ls.push_back(random_layer(rng, n, uniform(rng, 1, 6), 0.2, "L" + std::to_string(i)));
      sets.push_back(detected(ls.back()));
    }
    std::vector<const PartitionLayer*> ptrs;
    for (const auto& l : ls) ptrs.push_back(&l);
    const auto eff = eff_comm(sets);
    EXPECT_EQ(eff, eff_comm_reference(sets));
    EXPECT_TRUE(eff.same_partition(naive_comm(ptrs)));
    EXPECT_EQ(blocks_of(eff), components_of(n, brute_and_edges(ls)));
  }
}

TEST(EffComm, OrderInvariant) {
  Rng rng(42);
  for (int t = 0; t < 20; ++t) {
    std::vector<CommunitySet> sets;
    for (int i = 0; i < 3; ++i)
      sets.push_back(detected(random_layer(rng, 90, 4, 0.1, "L" + std::to_string(i))));
    std::vector<int> order = {0, 1, 2};
    const auto first = eff_comm(sets);
    do {
      const std::vector<CommunitySet> permuted = {sets[order[0]], sets[order[1]], sets[order[2]]};
      const auto cs = eff_comm(permuted);
      EXPECT_TRUE(cs.same_partition(first));
      for (std::size_t c = 0; c < cs.communities.size(); ++c)
        EXPECT_EQ(cs.communities[c].labels, first.communities[c].labels);
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST(EffComm, LabelsAreSoundAndCommunitiesNest) {
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    std::vector<PartitionLayer> ls;
    std::vector<CommunitySet> sets;
    for (int i = 0; i < 3; ++i) {
      ls.push_back(random_layer(rng, 120, 3, 0.1, "L" + std::to_string(i)));
      sets.push_back(detected(ls.back()));
    }
    const auto cs = eff_comm(sets);
    for (const auto& c : cs.communities) {
      for (const auto& l : ls) {
        const auto value = l.node_labels();
        ASSERT_TRUE(c.labels.count(l.feature));
        for (NodeId u : c.members) EXPECT_EQ(*value[u], c.labels.at(l.feature));
      }
      for (const auto& parent : sets) {
        std::size_t containing = 0;
        for (const auto& p : parent.communities)
          containing += std::includes(p.members.begin(), p.members.end(), c.members.begin(),
                                      c.members.end());
        EXPECT_EQ(containing, 1u);
      }
    }
  }
}
