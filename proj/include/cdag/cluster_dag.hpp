#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdag/admg.hpp"
#include "cdag/separation.hpp"

namespace cdag {

/// An ordered list of named, nonempty, pairwise disjoint blocks of variables.
class Partition {
 public:
  struct Block {
    Name cluster;
    NodeSet members;
    friend bool operator==(const Block&, const Block&) = default;
  };

  Partition() = default;

  explicit Partition(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    for (const auto& b : blocks_) {
      if (b.members.empty())
        throw PartitionError("cluster '" + b.cluster + "' is empty");
      if (!index_.emplace(b.cluster, &b - blocks_.data()).second)
        throw PartitionError("duplicate cluster name '" + b.cluster + "'");
      for (const auto& v : b.members) {
        auto [it, fresh] = owner_.emplace(v, b.cluster);
        if (!fresh)
          throw PartitionError("variable '" + v + "' is in both '" + it->second + "' and '" +
                               b.cluster + "'");
      }
    }
  }

  /// Every variable in its own cluster, named after the variable.
  static Partition singletons(const NodeSet& vars) {
    std::vector<Block> blocks;
    for (const auto& v : vars) blocks.push_back({v, {v}});
    return Partition(std::move(blocks));
  }

  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  NodeSet clusters() const {
    NodeSet out;
    for (const auto& b : blocks_) out.insert(b.cluster);
    return out;
  }

  NodeSet variables() const {
    NodeSet out;
    for (const auto& [v, c] : owner_) out.insert(v);
    return out;
  }

  bool has_cluster(const Name& c) const { return index_.count(c) > 0; }

  const NodeSet& members(const Name& cluster) const {
    auto it = index_.find(cluster);
    if (it == index_.end()) throw UnknownNodeError(cluster);
    return blocks_[it->second].members;
  }

  const Name& cluster_of(const Name& var) const {
    auto it = owner_.find(var);
    if (it == owner_.end()) throw UnknownNodeError(var);
    return it->second;
  }

  /// Union of the members of `clusters`.
  NodeSet expand(const NodeSet& clusters) const {
    NodeSet out;
    for (const auto& c : clusters) {
      const auto& m = members(c);
      out.insert(m.begin(), m.end());
    }
    return out;
  }

  /// Throws PartitionError unless the blocks cover exactly `vars`.
  void check_covers(const NodeSet& vars) const {
    for (const auto& v : vars)
      if (!owner_.count(v)) throw PartitionError("variable '" + v + "' is not in any cluster");
    for (const auto& [v, c] : owner_)
      if (!vars.count(v))
        throw PartitionError("cluster '" + c + "' lists unknown variable '" + v + "'");
  }

  friend bool operator==(const Partition& a, const Partition& b) { return a.blocks_ == b.blocks_; }

 private:
  std::vector<Block> blocks_;
  std::map<Name, std::size_t> index_;
  std::map<Name, Name> owner_;
};

/// A cluster DAG: an Admg over cluster names, with the partition when known.
struct ClusterDag {
  Admg graph;
  std::optional<Partition> partition;

  const NodeSet& clusters() const noexcept { return graph.nodes(); }
};

/// Quotient of `g` under `p`; throws InadmissibleError when the cluster graph
/// has a directed cycle.
inline ClusterDag build_cdag(const Admg& g, const Partition& p) {
  p.check_covers(g.nodes());
  EdgeSet directed;
  EdgeSet bidirected;
  for (const auto& [tail, head] : g.directed_edges()) {
    const auto& ct = p.cluster_of(tail);
    const auto& ch = p.cluster_of(head);
    if (ct != ch) directed.insert({ct, ch});
  }
  for (const auto& [a, b] : g.bidirected_edges()) {
    const auto& ca = p.cluster_of(a);
    const auto& cb = p.cluster_of(b);
    if (ca != cb) bidirected.insert(canonical_bidirected(ca, cb));
  }
  try {
    return ClusterDag{Admg(p.clusters(), directed, bidirected), p};
  } catch (const CycleError& e) {
    throw InadmissibleError(e.cycle());
  }
}

/// Exact quotient equality: build_cdag(g, p) succeeds and has c's edges.
inline bool is_compatible(const Admg& g, const ClusterDag& c, const Partition& p) {
  p.check_covers(g.nodes());
  if (p.clusters() != c.clusters())
    throw PartitionError("partition clusters do not match the C-DAG's nodes");
  try {
    return build_cdag(g, p).graph == c.graph;
  } catch (const InadmissibleError&) {
    return false;
  }
}

inline Admg as_admg(const ClusterDag& c) { return c.graph; }

/// The C-DAG with edges into `cut_into` and out of `cut_out_of` removed. The
/// partition is carried along unchanged.
inline ClusterDag mutilate_cdag(const ClusterDag& c, const NodeSet& cut_into,
                                const NodeSet& cut_out_of) {
  return ClusterDag{mutilate(c.graph, cut_into, cut_out_of), c.partition};
}

/// d-separation between cluster sets; conditioning on a cluster conditions on
/// all of its variables.
inline bool cdag_d_separated(const ClusterDag& c, const NodeSet& x, const NodeSet& y,
                             const NodeSet& z) {
  return m_separated(c.graph, x, y, z);
}

}  // namespace cdag
