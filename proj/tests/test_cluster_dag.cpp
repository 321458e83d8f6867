#include <gtest/gtest.h>

#include "support/helpers.hpp"

using namespace cdag;
using testing_support::graph;

namespace {

Admg frontdoor_diagram() {
  return graph(
      "D->X, X->S, S->Y, B->C, C->Y, A->Y, A->C, X<->B, C<->Y, D<->C");
}

}  // namespace

TEST(Partition, ValidatesBlocks) {
  EXPECT_THROW(Partition({Partition::Block{"Z", {}}}), PartitionError);
  EXPECT_THROW(Partition({{"Z", {"A"}}, {"Z", {"B"}}}), PartitionError);
  EXPECT_THROW(Partition({{"Z", {"A"}}, {"W", {"A"}}}), PartitionError);
  const Partition p({{"Z", {"A", "B"}}, {"X", {"X"}}});
  EXPECT_EQ(p.cluster_of("B"), "Z");
  EXPECT_EQ(p.expand({"Z"}), (NodeSet{"A", "B"}));
  EXPECT_EQ(p.clusters(), (NodeSet{"X", "Z"}));
  EXPECT_THROW(p.check_covers({"A", "B", "X", "Q"}), PartitionError);
}

TEST(ClusterDag, QuotientOfTheFrontDoorDiagram) {
  const Partition p({{"Z", {"A", "B", "C", "D"}}, {"X", {"X"}}, {"S", {"S"}}, {"Y", {"Y"}}});
  const ClusterDag c = build_cdag(frontdoor_diagram(), p);
  EXPECT_EQ(c.graph, graph("Z->X, Z<->X, Z->Y, Z<->Y, X->S, S->Y"));
  ASSERT_TRUE(c.partition.has_value());
}

TEST(ClusterDag, ClusteringSWithBKeepsAnAcyclicQuotient) {
  const Partition p({{"W", {"S", "B"}}, {"Z", {"A", "C"}}, {"D", {"D"}}, {"X", {"X"}}, {"Y", {"Y"}}});
  const ClusterDag c = build_cdag(frontdoor_diagram(), p);
  EXPECT_EQ(c.graph, graph("D->X, X->W, W->Y, X<->W, W->Z, Z->Y, Z<->Y, D<->Z"));
}

TEST(ClusterDag, InadmissiblePartitionReportsTheClusterCycle) {
  const Partition p({{"W", {"S", "B"}}, {"Z", {"A", "C", "D"}}, {"X", {"X"}}, {"Y", {"Y"}}});
  try {
    build_cdag(frontdoor_diagram(), p);
    FAIL() << "expected an inadmissible partition";
  } catch (const InadmissibleError& e) {
    EXPECT_EQ(e.cycle(), (std::vector<Name>{"W", "Z", "X"}));
  }
}

TEST(ClusterDag, SingletonPartitionIsTheDiagramItself) {
  const Admg g = frontdoor_diagram();
  EXPECT_EQ(build_cdag(g, Partition::singletons(g.nodes())).graph, g);
}

TEST(ClusterDag, Compatibility) {
  const Admg gc1 = graph("Z->X, Z->Y, X->Y");
  const Partition p({{"X", {"X"}}, {"Y", {"Y"}}, {"Z", {"Z1", "Z2", "Z3"}}});
  const Admg a = graph("X->Y, Z1->Z2, Z1->X, Z3->Z2, Z3->Y");
  const Admg c = graph("X->Y, Z1->Z2, Z3->Y, Z3->Z2, Z1<->Z3, Z3<->Y, Z1<->X");
  EXPECT_TRUE(is_compatible(a, testing_support::direct(gc1), p));
  EXPECT_FALSE(is_compatible(c, testing_support::direct(gc1), p));
  EXPECT_TRUE(is_compatible(c, testing_support::direct(graph("X->Y, Z->Y, Z<->X, Z<->Y")), p));
}

TEST(ClusterDag, MutilationAndSeparationAtClusterLevel) {
  const ClusterDag c{graph("Z->X, Z->Y, X->Y"), std::nullopt};
  EXPECT_FALSE(cdag_d_separated(c, {"X"}, {"Y"}, {"Z"}));
  const ClusterDag cut = mutilate_cdag(c, {}, {"X"});
  EXPECT_TRUE(cdag_d_separated(cut, {"X"}, {"Y"}, {"Z"}));
  EXPECT_EQ(as_admg(c), c.graph);
}
