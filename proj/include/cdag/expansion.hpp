#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdag/cluster_dag.hpp"

namespace cdag {

using ClusterSizes = std::map<Name, int>;

/// A variable-level diagram together with the partition that maps it onto a
/// C-DAG.
struct Expansion {
  Admg graph;
  Partition partition;
};

/// Variable names for an expanded cluster: the cluster name itself for size
/// one, otherwise `C_1 ... C_n`.
inline std::vector<Name> expansion_names(const Name& cluster, int size) {
  if (size == 1) return {cluster};
  std::vector<Name> out;
  for (int i = 1; i <= size; ++i) out.push_back(cluster + "_" + std::to_string(i));
  return out;
}

/// Checks that `sizes` covers exactly the clusters of `c` with positive values
/// and returns the per-cluster variable names (in chain order).
inline std::map<Name, std::vector<Name>> expansion_layout(const ClusterDag& c,
                                                          const ClusterSizes& sizes) {
  std::map<Name, std::vector<Name>> layout;
  NodeSet all;
  for (const auto& cl : c.clusters()) {
    auto it = sizes.find(cl);
    if (it == sizes.end()) throw InvalidQueryError("no size given for cluster '" + cl + "'");
    if (it->second < 1) throw InvalidQueryError("cluster size must be >= 1 for '" + cl + "'");
    layout[cl] = expansion_names(cl, it->second);
    for (const auto& v : layout[cl])
      if (!all.insert(v).second)
        throw PartitionError("expanded variable name '" + v + "' collides");
  }
  for (const auto& [cl, n] : sizes)
    if (!c.graph.has_node(cl)) throw UnknownNodeError(cl);
  return layout;
}

/// Every cross-cluster variable pair wired by the cluster edge type; each
/// cluster's internal structure is the chain V_1 → ... → V_n with a parallel
/// bidirected edge on every link.
inline Expansion chain_expansion(const ClusterDag& c, const ClusterSizes& sizes) {
  const auto layout = expansion_layout(c, sizes);
  NodeSet nodes;
  EdgeSet directed, bidirected;
  std::vector<Partition::Block> blocks;
  for (const auto& [cl, vars] : layout) {
    nodes.insert(vars.begin(), vars.end());
    blocks.push_back({cl, NodeSet(vars.begin(), vars.end())});
    for (std::size_t k = 0; k + 1 < vars.size(); ++k) {
      directed.insert({vars[k], vars[k + 1]});
      bidirected.insert(canonical_bidirected(vars[k], vars[k + 1]));
    }
  }
  for (const auto& [a, b] : c.graph.directed_edges())
    for (const auto& va : layout.at(a))
      for (const auto& vb : layout.at(b)) directed.insert({va, vb});
  for (const auto& [a, b] : c.graph.bidirected_edges())
    for (const auto& va : layout.at(a))
      for (const auto& vb : layout.at(b)) bidirected.insert(canonical_bidirected(va, vb));
  return Expansion{Admg(std::move(nodes), directed, bidirected), Partition(std::move(blocks))};
}

}  // namespace cdag
