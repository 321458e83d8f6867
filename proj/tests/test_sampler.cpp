#include <gtest/gtest.h>

#include "support/helpers.hpp"

using namespace cdag;

namespace {

ClusterSizes uniform_sizes(const ClusterDag& c, int n) {
  ClusterSizes s;
  for (const auto& cl : c.clusters()) s[cl] = n;
  return s;
}

}  // namespace

TEST(Sampler, ExpansionsAreCompatibleUnderEveryPolicy) {
  Rng rng(3);
  const std::vector<InternalPolicy> internals{InternalPolicy::random(0.5, 0.3), InternalPolicy::chain(),
                                              InternalPolicy::full(), InternalPolicy::empty()};
  const std::vector<CrossPolicy> crosses{CrossPolicy::minimal_witness(), CrossPolicy::random(0.4),
                                         CrossPolicy::full()};
  for (int trial = 0; trial < 40; ++trial) {
    const ClusterDag c = testing_support::direct(testing_support::random_admg(rng, 5, 0.4, 0.3, "C"));
    ClusterSizes sizes;
    for (const auto& cl : c.clusters()) sizes[cl] = 1 + static_cast<int>(rng.below(3));
    for (const auto& in : internals)
      for (const auto& cr : crosses) {
        const auto ex = expand(c, {sizes, in, cr, rng.below(1000)});
        EXPECT_TRUE(is_compatible(ex.graph, c, ex.partition));
        EXPECT_EQ(build_cdag(ex.graph, ex.partition).graph, c.graph);
        for (const auto& cl : c.clusters())
          EXPECT_EQ(ex.partition.members(cl).size(), static_cast<std::size_t>(sizes.at(cl)));
      }
  }
}

TEST(Sampler, InternalPolicyShapes) {
  const ClusterDag c = testing_support::direct(testing_support::graph("A"));
  const ClusterSizes sizes{{"A", 4}};
  const auto chain = expand(c, {sizes, InternalPolicy::chain(), CrossPolicy::minimal_witness(), 1});
  EXPECT_EQ(chain.graph.directed_edges().size(), 3u);
  EXPECT_EQ(chain.graph.bidirected_edges().size(), 3u);
  const auto full = expand(c, {sizes, InternalPolicy::full(), CrossPolicy::minimal_witness(), 1});
  EXPECT_EQ(full.graph.directed_edges().size(), 6u);
  EXPECT_EQ(full.graph.bidirected_edges().size(), 6u);
  const auto empty = expand(c, {sizes, InternalPolicy::empty(), CrossPolicy::minimal_witness(), 1});
  EXPECT_TRUE(empty.graph.directed_edges().empty());
  EXPECT_EQ(empty.graph.nodes(), (NodeSet{"A_1", "A_2", "A_3", "A_4"}));
}

TEST(Sampler, CrossPolicyShapes) {
  const ClusterDag c = testing_support::direct(testing_support::graph("A->B, A<->B"));
  const auto sizes = uniform_sizes(c, 3);
  const auto minimal = expand(c, {sizes, InternalPolicy::empty(), CrossPolicy::minimal_witness(), 1});
  EXPECT_EQ(minimal.graph.directed_edges().size(), 1u);
  EXPECT_EQ(minimal.graph.bidirected_edges().size(), 1u);
  const auto full = expand(c, {sizes, InternalPolicy::empty(), CrossPolicy::full(), 1});
  EXPECT_EQ(full.graph.directed_edges().size(), 9u);
  EXPECT_EQ(full.graph.bidirected_edges().size(), 9u);
}

TEST(Sampler, SeedsAreReproducible) {
  const ClusterDag c = testing_support::load_fig("gc2.cdag").cdag;
  const ExpansionSpec spec{{{"X", 1}, {"Y", 1}, {"Z", 6}}, InternalPolicy::random(0.5, 0.3),
                           CrossPolicy::random(0.3), 123};
  const auto a = expand(c, spec);
  const auto b = expand(c, spec);
  EXPECT_EQ(a.graph, b.graph);
  const auto batch = sample_batch(c, spec, 5);
  ASSERT_EQ(batch.size(), 5u);
  auto item = spec;
  item.seed = derive_seed(spec.seed, 3);
  EXPECT_EQ(batch[3].graph, expand(c, item).graph);
  bool any_differ = false;
  for (const auto& e : batch) any_differ = any_differ || !(e.graph == batch[0].graph);
  EXPECT_TRUE(any_differ);
}

TEST(Sampler, Validation) {
  const ClusterDag c = testing_support::direct(testing_support::graph("A->B"));
  EXPECT_THROW(expand(c, {{{"A", 1}}, {}, {}, 0}), InvalidQueryError);
  EXPECT_THROW(expand(c, {{{"A", 1}, {"B", 0}}, {}, {}, 0}), InvalidQueryError);
  EXPECT_THROW(expand(c, {{{"A", 1}, {"B", 1}, {"Q", 1}}, {}, {}, 0}), UnknownNodeError);
  EXPECT_THROW(expand(c, {{{"A", 1}, {"B", 1}}, InternalPolicy::random(1.5, 0.0), {}, 0}), InvalidQueryError);
}

TEST(Sampler, ChainExpansionNamesAndWiring) {
  const ClusterDag c = testing_support::direct(testing_support::graph("A->B"));
  const auto ex = chain_expansion(c, {{"A", 2}, {"B", 1}});
  EXPECT_EQ(ex.graph.nodes(), (NodeSet{"A_1", "A_2", "B"}));
  EXPECT_TRUE(ex.graph.has_directed("A_1", "A_2"));
  EXPECT_TRUE(ex.graph.has_bidirected("A_1", "A_2"));
  EXPECT_TRUE(ex.graph.has_directed("A_1", "B"));
  EXPECT_TRUE(ex.graph.has_directed("A_2", "B"));
}
