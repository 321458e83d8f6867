#include <gtest/gtest.h>

#include "support/helpers.hpp"

using namespace cdag;
using testing_support::direct;
using testing_support::graph;

TEST(DoCalculus, RuleOneDropsIrrelevantObservations) {
  // Z is independent of Y once X is fixed by intervention.
  const ClusterDag c = direct(graph("Z->X, X->Y"));
  const auto v = rule1(c, {{"X"}, {"Y"}, {"Z"}, {}});
  EXPECT_TRUE(v.applies);
  EXPECT_EQ(v.equality_granted, "P(y|do(x),z) = P(y|do(x))");
  EXPECT_FALSE(rule1(direct(graph("Z->Y, X->Y")), {{"X"}, {"Y"}, {"Z"}, {}}).applies);
}

TEST(DoCalculus, RuleTwoExchangesActionAndObservation) {
  const ClusterDag gc1 = direct(graph("Z->X, Z->Y, X->Y"));
  const auto v = rule2(gc1, {{}, {"Y"}, {"X"}, {"Z"}});
  EXPECT_TRUE(v.applies);
  EXPECT_EQ(v.equality_granted, "P(y|do(x),z) = P(y|x,z)");
  EXPECT_FALSE(rule2(gc1, {{}, {"Y"}, {"X"}, {}}).applies);
  const ClusterDag bow = direct(graph("X->Y, X<->Y"));
  EXPECT_FALSE(rule2(bow, {{}, {"Y"}, {"X"}, {}}).applies);
}

TEST(DoCalculus, RuleThreeUsesZOfW) {
  // Z -> W -> Y with Z also a parent of nothing else: do(z) is irrelevant
  // given w only if Z is not an ancestor of W.
  const ClusterDag c = direct(graph("Z->W, W->Y"));
  const auto v = rule3(c, {{}, {"Y"}, {"Z"}, {"W"}});
  EXPECT_TRUE(v.z_of_w.empty());
  EXPECT_TRUE(v.applies);
  const auto u = rule3(direct(graph("Z->Y, W")), {{}, {"Y"}, {"Z"}, {"W"}});
  EXPECT_EQ(u.z_of_w, (NodeSet{"Z"}));
  EXPECT_FALSE(u.applies);
  const auto none = rule3(direct(graph("X->Y, Z")), {{"X"}, {"Y"}, {"Z"}, {}});
  EXPECT_TRUE(none.applies);
  EXPECT_EQ(none.equality_granted, "P(y|do(x,z)) = P(y|do(x))");
}

TEST(DoCalculus, FrontDoorStepsAtClusterLevel) {
  const ClusterDag c = direct(graph("Z->X, Z<->X, Z->Y, Z<->Y, X->S, S->Y"));
  // P(s | do(x)) = P(s | x)
  EXPECT_TRUE(rule2(c, {{}, {"S"}, {"X"}, {}}).applies);
  // P(y | do(s)) is not P(y | s): the back door through X is open.
  EXPECT_FALSE(rule2(c, {{}, {"Y"}, {"S"}, {}}).applies);
  // ... but it is P(y | s, x) after conditioning on X.
  EXPECT_TRUE(rule2(c, {{}, {"Y"}, {"S"}, {"X"}}).applies);
  // do(x) has no effect on Y once S is intervened on.
  EXPECT_TRUE(rule3(c, {{"S"}, {"Y"}, {"X"}, {}}).applies);
}

TEST(DoCalculus, ApplyRuleDispatchesAndValidates) {
  const ClusterDag c = direct(graph("X->Y, Z"));
  EXPECT_EQ(apply_rule(Rule::R3, c, {{"X"}, {"Y"}, {"Z"}, {}}).rule, Rule::R3);
  EXPECT_THROW(rule1(c, {{"X"}, {"Y"}, {"X"}, {}}), InvalidQueryError);
  EXPECT_THROW(rule1(c, {{"X"}, {}, {"Z"}, {}}), InvalidQueryError);
  EXPECT_THROW(rule1(c, {{"Q"}, {"Y"}, {}, {}}), UnknownNodeError);
}

TEST(DoCalculus, LicensedEqualitiesHoldNumerically) {
  // Rule 2 on the backdoor C-DAG: P(y | do(x), z) = P(y | x, z), checked on
  // an expansion with a two-variable Z cluster.
  const Admg g = graph("Z1->Z2, Z1->X, Z2->Y, X->Y, Z1<->Z2");
  const Partition p({{"X", {"X"}}, {"Y", {"Y"}}, {"Z", {"Z1", "Z2"}}});
  const ClusterDag c = build_cdag(g, p);
  ASSERT_TRUE(rule2(c, {{}, {"Y"}, {"X"}, {"Z"}}).applies);
  const DiscreteCbn m = random_cbn(g, 11);
  const JointTable obs = joint_distribution(m).group(p);
  for (int x = 0; x < 2; ++x) {
    const JointTable post = intervened_joint(m, {{"X", x}}).group(p);
    for (int z = 0; z < 4; ++z)
      for (int y = 0; y < 2; ++y) {
        const double lhs = post.prob({{"X", x}, {"Y", y}, {"Z", z}}) / post.prob({{"X", x}, {"Z", z}});
        const double rhs = obs.prob({{"X", x}, {"Y", y}, {"Z", z}}) / obs.prob({{"X", x}, {"Z", z}});
        EXPECT_NEAR(lhs, rhs, 1e-9);
      }
  }
}
