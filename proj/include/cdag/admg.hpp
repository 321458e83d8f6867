#pragma once

#include <algorithm>
#include <deque>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cdag/errors.hpp"

namespace cdag {

using Name = std::string;
/// Ordered (lexicographic) set of node names.
using NodeSet = std::set<Name>;
/// (tail, head) for directed edges; (min, max) for bidirected edges.
using Edge = std::pair<Name, Name>;
using EdgeSet = std::set<Edge>;

inline Edge canonical_bidirected(const Name& a, const Name& b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

namespace detail {

/// Shortest directed cycle among `nodes`, rotated to start at its smallest node.
inline std::vector<Name> shortest_cycle(const NodeSet& nodes,
                                        const std::map<Name, NodeSet>& children) {
  std::vector<Name> best;
  for (const auto& start : nodes) {
    std::map<Name, Name> prev;
    std::deque<Name> queue{start};
    std::set<Name> seen{start};
    bool closed = false;
    Name last;
    while (!queue.empty() && !closed) {
      Name v = queue.front();
      queue.pop_front();
      auto it = children.find(v);
      if (it == children.end()) continue;
      for (const auto& w : it->second) {
        if (w == start) {
          closed = true;
          last = v;
          break;
        }
        if (seen.insert(w).second) {
          prev[w] = v;
          queue.push_back(w);
        }
      }
    }
    if (!closed) continue;
    std::vector<Name> cycle;
    for (Name v = last;; v = prev.at(v)) {
      cycle.push_back(v);
      if (v == start) break;
    }
    std::reverse(cycle.begin(), cycle.end());
    if (best.empty() || cycle.size() < best.size()) best = std::move(cycle);
  }
  if (!best.empty()) {
    auto smallest = std::min_element(best.begin(), best.end());
    std::rotate(best.begin(), smallest, best.end());
  }
  return best;
}

}  // namespace detail

/// Kahn's algorithm with lexicographic tie-break. Throws CycleError carrying
/// a shortest cycle when the directed graph is not acyclic.
inline std::vector<Name> topological_order(const NodeSet& nodes, const EdgeSet& directed) {
  std::map<Name, NodeSet> children;
  std::map<Name, int> indegree;
  for (const auto& v : nodes) indegree[v] = 0;
  for (const auto& [tail, head] : directed) {
    if (!nodes.count(tail)) throw UnknownNodeError(tail);
    if (!nodes.count(head)) throw UnknownNodeError(head);
    if (children[tail].insert(head).second) ++indegree[head];
  }
  std::set<Name> ready;
  for (const auto& [v, d] : indegree)
    if (d == 0) ready.insert(v);
  std::vector<Name> order;
  order.reserve(nodes.size());
  while (!ready.empty()) {
    Name v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (const auto& w : children[v])
      if (--indegree[w] == 0) ready.insert(w);
  }
  if (order.size() != nodes.size()) {
    NodeSet remaining;
    for (const auto& [v, d] : indegree)
      if (d > 0) remaining.insert(v);
    throw CycleError(detail::shortest_cycle(remaining, children));
  }
  return order;
}

/// Acyclic directed mixed graph. Immutable; validated on construction.
class Admg {
 public:
  Admg() = default;

  Admg(NodeSet nodes, const EdgeSet& directed, const EdgeSet& bidirected)
      : nodes_(std::move(nodes)) {
    for (const auto& v : nodes_) {
      parents_[v];
      children_[v];
      siblings_[v];
    }
    for (const auto& [tail, head] : directed) {
      check_endpoint(tail);
      check_endpoint(head);
      if (tail == head) throw InvalidGraphError("self-loop on '" + tail + "'");
      directed_.insert({tail, head});
      parents_[head].insert(tail);
      children_[tail].insert(head);
    }
    for (const auto& [a, b] : bidirected) {
      check_endpoint(a);
      check_endpoint(b);
      if (a == b) throw InvalidGraphError("bidirected self-loop on '" + a + "'");
      bidirected_.insert(canonical_bidirected(a, b));
      siblings_[a].insert(b);
      siblings_[b].insert(a);
    }
    order_ = cdag::topological_order(nodes_, directed_);
  }

  const NodeSet& nodes() const noexcept { return nodes_; }
  const EdgeSet& directed_edges() const noexcept { return directed_; }
  const EdgeSet& bidirected_edges() const noexcept { return bidirected_; }
  const std::vector<Name>& topological_order() const noexcept { return order_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  bool has_node(const Name& v) const { return nodes_.count(v) > 0; }
  bool has_directed(const Name& tail, const Name& head) const {
    return directed_.count({tail, head}) > 0;
  }
  bool has_bidirected(const Name& a, const Name& b) const {
    return bidirected_.count(canonical_bidirected(a, b)) > 0;
  }

  const NodeSet& parents_of(const Name& v) const { return lookup(parents_, v); }
  const NodeSet& children_of(const Name& v) const { return lookup(children_, v); }
  /// Bidirected neighbours.
  const NodeSet& siblings_of(const Name& v) const { return lookup(siblings_, v); }

  void require(const NodeSet& s) const {
    for (const auto& v : s)
      if (!has_node(v)) throw UnknownNodeError(v);
  }

  friend bool operator==(const Admg& a, const Admg& b) {
    return a.nodes_ == b.nodes_ && a.directed_ == b.directed_ &&
           a.bidirected_ == b.bidirected_;
  }

 private:
  void check_endpoint(const Name& v) const {
    if (!nodes_.count(v)) throw UnknownNodeError(v);
  }
  static const NodeSet& lookup(const std::map<Name, NodeSet>& m, const Name& v) {
    auto it = m.find(v);
    if (it == m.end()) throw UnknownNodeError(v);
    return it->second;
  }

  NodeSet nodes_;
  EdgeSet directed_;
  EdgeSet bidirected_;
  std::map<Name, NodeSet> parents_;
  std::map<Name, NodeSet> children_;
  std::map<Name, NodeSet> siblings_;
  std::vector<Name> order_;
};

inline NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

inline bool is_subset(const NodeSet& a, const NodeSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool disjoint(const NodeSet& a, const NodeSet& b) {
  return set_intersection(a, b).empty();
}

// Kinship follows directed edges only.

inline NodeSet parents(const Admg& g, const NodeSet& s) {
  g.require(s);
  NodeSet out;
  for (const auto& v : s) {
    const auto& p = g.parents_of(v);
    out.insert(p.begin(), p.end());
  }
  return out;
}

inline NodeSet children(const Admg& g, const NodeSet& s) {
  g.require(s);
  NodeSet out;
  for (const auto& v : s) {
    const auto& c = g.children_of(v);
    out.insert(c.begin(), c.end());
  }
  return out;
}

namespace detail {
template <typename Step>
NodeSet closure(const Admg& g, const NodeSet& s, Step step) {
  g.require(s);
  NodeSet seen;
  std::vector<Name> stack(s.begin(), s.end());
  while (!stack.empty()) {
    Name v = stack.back();
    stack.pop_back();
    for (const auto& w : step(v))
      if (seen.insert(w).second) stack.push_back(w);
  }
  return seen;
}
}  // namespace detail

/// Transitive closure of parents, with `s` itself removed.
inline NodeSet ancestors(const Admg& g, const NodeSet& s) {
  return set_difference(
      detail::closure(g, s, [&](const Name& v) -> const NodeSet& { return g.parents_of(v); }),
      s);
}

inline NodeSet descendants(const Admg& g, const NodeSet& s) {
  return set_difference(
      detail::closure(g, s, [&](const Name& v) -> const NodeSet& { return g.children_of(v); }),
      s);
}

/// s ∪ An(s).
inline NodeSet ancestral_closure(const Admg& g, const NodeSet& s) {
  return set_union(s, ancestors(g, s));
}

/// Drops every edge with an arrowhead at `cut_into` and every directed edge
/// leaving `cut_out_of`.
inline Admg mutilate(const Admg& g, const NodeSet& cut_into, const NodeSet& cut_out_of) {
  g.require(cut_into);
  g.require(cut_out_of);
  EdgeSet directed;
  for (const auto& e : g.directed_edges())
    if (!cut_into.count(e.second) && !cut_out_of.count(e.first)) directed.insert(e);
  EdgeSet bidirected;
  for (const auto& e : g.bidirected_edges())
    if (!cut_into.count(e.first) && !cut_into.count(e.second)) bidirected.insert(e);
  return Admg(g.nodes(), directed, bidirected);
}

inline Admg induced_subgraph(const Admg& g, const NodeSet& s) {
  g.require(s);
  EdgeSet directed;
  for (const auto& e : g.directed_edges())
    if (s.count(e.first) && s.count(e.second)) directed.insert(e);
  EdgeSet bidirected;
  for (const auto& e : g.bidirected_edges())
    if (s.count(e.first) && s.count(e.second)) bidirected.insert(e);
  return Admg(s, directed, bidirected);
}

/// Connected components of the bidirected skeleton, ordered by smallest member.
inline std::vector<NodeSet> c_components(const Admg& g) {
  std::vector<NodeSet> out;
  NodeSet assigned;
  for (const auto& v : g.nodes()) {
    if (assigned.count(v)) continue;
    NodeSet comp{v};
    std::vector<Name> stack{v};
    while (!stack.empty()) {
      Name u = stack.back();
      stack.pop_back();
      for (const auto& w : g.siblings_of(u))
        if (comp.insert(w).second) stack.push_back(w);
    }
    assigned.insert(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

/// The c-component of `g` containing `v`.
inline NodeSet c_component_of(const Admg& g, const Name& v) {
  for (auto& comp : c_components(g))
    if (comp.count(v)) return comp;
  throw UnknownNodeError(v);
}

}  // namespace cdag
