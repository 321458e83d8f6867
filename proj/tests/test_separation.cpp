#include <gtest/gtest.h>

#include "support/helpers.hpp"

using namespace cdag;
using testing_support::brute_m_separated;
using testing_support::graph;

TEST(Separation, ChainForkCollider) {
  const Admg chain = graph("X->M, M->Y");
  EXPECT_FALSE(m_separated(chain, {"X"}, {"Y"}, {}));
  EXPECT_TRUE(m_separated(chain, {"X"}, {"Y"}, {"M"}));

  const Admg fork = graph("M->X, M->Y");
  EXPECT_FALSE(m_separated(fork, {"X"}, {"Y"}, {}));
  EXPECT_TRUE(m_separated(fork, {"X"}, {"Y"}, {"M"}));

  const Admg collider = graph("X->C, Y->C, C->D");
  EXPECT_TRUE(m_separated(collider, {"X"}, {"Y"}, {}));
  EXPECT_FALSE(m_separated(collider, {"X"}, {"Y"}, {"C"}));
  EXPECT_FALSE(m_separated(collider, {"X"}, {"Y"}, {"D"}));
}

TEST(Separation, BidirectedEdgesCarryArrowheadsAtBothEnds) {
  const Admg g = graph("X<->M, M<->Y");
  EXPECT_TRUE(m_separated(g, {"X"}, {"Y"}, {}));
  EXPECT_FALSE(m_separated(g, {"X"}, {"Y"}, {"M"}));
  EXPECT_FALSE(m_separated(graph("X<->Y"), {"X"}, {"Y"}, {}));
}

TEST(Separation, EmptySetsAreTriviallySeparated) {
  const Admg g = graph("X->Y");
  EXPECT_TRUE(m_separated(g, {}, {"Y"}, {}));
  EXPECT_TRUE(m_separated(g, {"X"}, {}, {}));
}

TEST(Separation, RejectsOverlappingOrUnknownSets) {
  const Admg g = graph("X->Y, Z");
  EXPECT_THROW(m_separated(g, {"X"}, {"X"}, {}), InvalidQueryError);
  EXPECT_THROW(m_separated(g, {"X"}, {"Y"}, {"Y"}), InvalidQueryError);
  EXPECT_THROW(m_separated(g, {"Q"}, {"Y"}, {}), UnknownNodeError);
}

TEST(Separation, AgreesWithPathEnumerationOnRandomGraphs) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const Admg g = testing_support::random_admg(rng, n, 0.4, 0.25);
    NodeSet rest = g.nodes();
    const Name x = testing_support::pick(rng, rest);
    rest.erase(x);
    const Name y = testing_support::pick(rng, rest);
    rest.erase(y);
    const NodeSet z = testing_support::random_subset(rng, rest, 0.4);
    EXPECT_EQ(m_separated(g, {x}, {y}, z), brute_m_separated(g, {x}, {y}, z))
        << "trial " << trial;
  }
}
