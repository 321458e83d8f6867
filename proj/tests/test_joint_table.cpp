#include <gtest/gtest.h>

#include <sstream>

#include "support/helpers.hpp"

using namespace cdag;
using testing_support::random_table;

TEST(JointTable, LayoutIsLastFastest) {
  const JointTable t({"A", "B"}, {2, 3}, {0.1, 0.1, 0.1, 0.2, 0.2, 0.3});
  EXPECT_EQ(t.encode({1, 0}), 3u);
  EXPECT_EQ(t.decode(5), (std::vector<int>{1, 2}));
  EXPECT_DOUBLE_EQ(t.at({1, 2}), 0.3);
  EXPECT_EQ(t.card("B"), 3);
}

TEST(JointTable, ValidatesConstruction) {
  EXPECT_THROW(JointTable({"A"}, {2}, {0.5, 0.6}), InvalidQueryError);
  EXPECT_THROW(JointTable({"A"}, {2}, {0.5}), InvalidQueryError);
  EXPECT_THROW(JointTable({"A", "A"}, {1, 1}, {1.0}), InvalidQueryError);
  EXPECT_THROW(JointTable({"A"}, {2}, {-0.5, 1.5}), InvalidQueryError);
  EXPECT_THROW(JointTable({"A"}, {0}, {}), InvalidQueryError);
  // Within the sum tolerance is fine.
  EXPECT_NO_THROW(JointTable({"A"}, {2}, {0.5, 0.5 + 5e-11}));
}

TEST(JointTable, MarginalMatchesBruteForce) {
  Rng rng(1);
  const auto t = random_table(rng, {"A", "B", "C"}, {2, 3, 2});
  const auto m = t.marginal({"C", "A"});
  for (int c = 0; c < 2; ++c)
    for (int a = 0; a < 2; ++a) {
      double s = 0.0;
      for (int b = 0; b < 3; ++b) s += t.at({a, b, c});
      EXPECT_NEAR(m.at({c, a}), s, 1e-15);
      EXPECT_NEAR(t.prob({{"A", a}, {"C", c}}), s, 1e-15);
    }
  EXPECT_THROW(t.prob({{"A", 2}}), InvalidQueryError);
  EXPECT_THROW(t.marginal({"Q"}), UnknownNodeError);
}

TEST(JointTable, GroupEncodesMembersInNameOrder) {
  Rng rng(2);
  const auto t = random_table(rng, {"B", "A", "C"}, {2, 3, 2});
  const Partition p({{"K", {"A", "B"}}, {"C", {"C"}}});
  const auto g = t.group(p);
  EXPECT_EQ(g.card("K"), 6);
  // K state = a * card(B) + b.
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        EXPECT_NEAR(g.prob({{"K", a * 2 + b}, {"C", c}}), t.prob({{"A", a}, {"B", b}, {"C", c}}), 1e-15);
  EXPECT_THROW(t.group(Partition({{"K", {"A", "B"}}})), PartitionError);
}

TEST(JointTable, CsvRoundTrip) {
  Rng rng(3);
  const auto t = random_table(rng, {"A", "B"}, {2, 3});
  std::stringstream ss;
  t.write_csv(ss);
  const auto back = JointTable::read_csv(ss);
  EXPECT_EQ(back.variables(), t.variables());
  EXPECT_EQ(back.cards(), t.cards());
  EXPECT_EQ(back.max_abs_diff(t), 0.0);
}

TEST(JointTable, CsvErrors) {
  std::stringstream none("");
  EXPECT_THROW(JointTable::read_csv(none), ParseError);
  std::stringstream no_p("A,B\n0,1\n");
  EXPECT_THROW(JointTable::read_csv(no_p), ParseError);
  std::stringstream bad_value("A,p\nx,1\n");
  EXPECT_THROW(JointTable::read_csv(bad_value), ParseError);
  std::stringstream short_row("A,B,p\n0,1\n");
  EXPECT_THROW(JointTable::read_csv(short_row), ParseError);
  std::stringstream unnormalized("A,p\n0,0.5\n1,0.6\n");
  EXPECT_THROW(JointTable::read_csv(unnormalized), InvalidQueryError);
}

TEST(JointTable, FromSamplesCountsWithPseudoCounts) {
  const std::vector<std::vector<int>> rows{{0, 1}, {0, 1}, {1, 0}, {0, 0}};
  const auto t = JointTable::from_samples({"A", "B"}, {2, 2}, rows);
  EXPECT_DOUBLE_EQ(t.at({0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(t.at({1, 1}), 0.0);
  const auto s = JointTable::from_samples({"A", "B"}, {2, 2}, rows, 1.0);
  EXPECT_DOUBLE_EQ(s.at({1, 1}), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(s.at({0, 1}), 3.0 / 8.0);
}
