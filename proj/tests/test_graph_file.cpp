#include <gtest/gtest.h>

#include "support/helpers.hpp"

using namespace cdag;
using testing_support::load_fig;

namespace {

int error_line(const std::string& text) {
  try {
    parse_graph(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(GraphFile, ParsesDiagramWithPartition) {
  const auto f = load_fig("frontdoor_clustered.cdag");
  ASSERT_TRUE(f.admg && f.partition);
  EXPECT_EQ(f.admg->nodes().size(), 7u);
  EXPECT_EQ(f.partition->members("Z"), (NodeSet{"A", "B", "C", "D"}));
  EXPECT_EQ(f.cdag.clusters(), (NodeSet{"S", "X", "Y", "Z"}));
  EXPECT_TRUE(f.cdag.graph.has_bidirected("X", "Z"));
  EXPECT_EQ(f.cdag.graph, load_fig("frontdoor.cdag").cdag.graph);
}

TEST(GraphFile, PlainDiagramIsItsOwnCdag) {
  const auto f = load_fig("collider.cdag");
  ASSERT_TRUE(f.admg);
  EXPECT_FALSE(f.partition);
  EXPECT_EQ(f.cdag.graph, *f.admg);
}

TEST(GraphFile, DirectCdag) {
  const auto f = load_fig("gc2.cdag");
  EXPECT_FALSE(f.admg);
  EXPECT_EQ(f.cdag.clusters(), (NodeSet{"X", "Y", "Z"}));
}

TEST(GraphFile, RoundTripsFixturesAndRandomGraphs) {
  for (const char* fig : {"frontdoor_clustered.cdag", "gc2.cdag", "collider.cdag", "joint_effect.cdag"}) {
    const auto f = load_fig(fig);
    EXPECT_EQ(parse_graph(render_graph(f)), f) << fig;
  }
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Admg g = testing_support::random_admg(rng, 6, 0.4, 0.3);
    EXPECT_EQ(parse_graph(render_graph(graph_file(g))), graph_file(g));
  }
}

TEST(GraphFile, QuotedNamesAndComments) {
  const auto f = parse_graph(
      "# a comment\n"
      "node \"blood pressure\"\n"
      "node \"say \\\"hi\\\"\"  # trailing comment\n"
      "edge \"blood pressure\" -> \"say \\\"hi\\\"\"\n");
  ASSERT_TRUE(f.admg);
  EXPECT_TRUE(f.admg->has_directed("blood pressure", "say \"hi\""));
  EXPECT_EQ(parse_graph(render_graph(f)), f);
}

TEST(GraphFile, MembersMayBeCommaSeparated) {
  const auto f = parse_graph("node A\nnode B\nnode C\nedge A -> C\ncluster K = { A, B }\ncluster C = { C }\n");
  EXPECT_EQ(f.partition->members("K"), (NodeSet{"A", "B"}));
  EXPECT_TRUE(f.cdag.graph.has_directed("K", "C"));
}

TEST(GraphFile, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("node A\nedge A -> A\n"), 2);
  EXPECT_EQ(error_line("node A\nnode A\n"), 2);
  EXPECT_EQ(error_line("node A\nedge A -> B\n"), 2);
  EXPECT_EQ(error_line("node A\nnode B\nedge A -> B\nedge A -> B\n"), 4);
  EXPECT_EQ(error_line("frob A\n"), 1);
  EXPECT_EQ(error_line("node A\nnode B\ncluster K = { A }\n"), 2);
  EXPECT_EQ(error_line("node A\ncluster K = { A }\ncluster L\n"), 3);
  EXPECT_EQ(error_line("node A\ncluster K = { A\n"), 2);
  EXPECT_EQ(error_line("node \"unterminated\n"), 1);
}

TEST(GraphFile, InadmissiblePartitionsAreRejected) {
  EXPECT_THROW(load_fig("frontdoor_inadmissible.cdag"), InadmissibleError);
  EXPECT_THROW(parse_graph("node A\nnode B\nedge A -> B\nedge B -> A\n"), CycleError);
}
