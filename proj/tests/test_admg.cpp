#include <gtest/gtest.h>

#include "support/helpers.hpp"

using namespace cdag;
using testing_support::graph;

TEST(Admg, BuildsAdjacency) {
  const Admg g = graph("Z->X, Z->Y, X->Y, Z<->X");
  EXPECT_EQ(g.nodes(), (NodeSet{"X", "Y", "Z"}));
  EXPECT_TRUE(g.has_directed("Z", "X"));
  EXPECT_FALSE(g.has_directed("X", "Z"));
  EXPECT_TRUE(g.has_bidirected("X", "Z"));
  EXPECT_TRUE(g.has_bidirected("Z", "X"));
  EXPECT_EQ(g.parents_of("Y"), (NodeSet{"X", "Z"}));
  EXPECT_EQ(g.children_of("Z"), (NodeSet{"X", "Y"}));
  EXPECT_EQ(g.siblings_of("X"), (NodeSet{"Z"}));
}

TEST(Admg, TopologicalOrderBreaksTiesByName) {
  const Admg g = graph("B->A, C, D->A");
  EXPECT_EQ(g.topological_order(), (std::vector<Name>{"B", "C", "D", "A"}));
}

TEST(Admg, CycleReportsShortestCycleFromSmallestNode) {
  try {
    graph("A->B, B->C, C->A, C->D, D->C");
    FAIL() << "expected a cycle";
  } catch (const CycleError& e) {
    EXPECT_EQ(e.cycle(), (std::vector<Name>{"C", "D"}));
  }
}

TEST(Admg, RejectsSelfLoopsAndUnknownEndpoints) {
  EXPECT_THROW(Admg({"X"}, {{"X", "X"}}, {}), InvalidGraphError);
  EXPECT_THROW(Admg({"X"}, {}, {{"X", "X"}}), InvalidGraphError);
  EXPECT_THROW(Admg({"X"}, {{"X", "Y"}}, {}), UnknownNodeError);
}

TEST(Admg, BidirectedEdgesDoNotCreateCycles) {
  EXPECT_NO_THROW(graph("X->Y, X<->Y"));
}

TEST(Admg, AncestorsAndDescendantsAreStrict) {
  const Admg g = graph("A->B, B->C, D->C, C->E");
  EXPECT_EQ(ancestors(g, {"C"}), (NodeSet{"A", "B", "D"}));
  EXPECT_EQ(descendants(g, {"B"}), (NodeSet{"C", "E"}));
  EXPECT_EQ(ancestral_closure(g, {"C"}), (NodeSet{"A", "B", "C", "D"}));
  EXPECT_EQ(parents(g, {"C", "B"}), (NodeSet{"A", "B", "D"}));
  EXPECT_EQ(children(g, {"A", "D"}), (NodeSet{"B", "C"}));
}

TEST(Admg, MutilationRemovesTheRightEdges) {
  const Admg g = graph("Z->X, X->Y, Z<->X, X<->Y, Z->Y");
  const Admg into = mutilate(g, {"X"}, {});
  EXPECT_FALSE(into.has_directed("Z", "X"));
  EXPECT_FALSE(into.has_bidirected("Z", "X"));
  EXPECT_FALSE(into.has_bidirected("X", "Y"));
  EXPECT_TRUE(into.has_directed("X", "Y"));
  const Admg out_of = mutilate(g, {}, {"X"});
  EXPECT_FALSE(out_of.has_directed("X", "Y"));
  EXPECT_TRUE(out_of.has_bidirected("X", "Y"));
  EXPECT_TRUE(out_of.has_directed("Z", "X"));
}

TEST(Admg, InducedSubgraphAndCComponents) {
  const Admg g = graph("A<->B, B->C, C<->D, E");
  const Admg sub = induced_subgraph(g, {"A", "B", "C"});
  EXPECT_EQ(sub.nodes(), (NodeSet{"A", "B", "C"}));
  EXPECT_TRUE(sub.has_directed("B", "C"));
  EXPECT_EQ(sub.bidirected_edges().size(), 1u);
  const auto comps = c_components(g);
  ASSERT_EQ(comps.size(), 3u);
  EXPECT_EQ(comps[0], (NodeSet{"A", "B"}));
  EXPECT_EQ(comps[1], (NodeSet{"C", "D"}));
  EXPECT_EQ(comps[2], (NodeSet{"E"}));
  EXPECT_EQ(c_component_of(g, "D"), (NodeSet{"C", "D"}));
}

TEST(Admg, EqualityIgnoresConstructionOrder) {
  EXPECT_EQ(graph("A->B, B<->C"), graph("C<->B, A->B"));
  EXPECT_FALSE(graph("A->B") == graph("B->A"));
}
