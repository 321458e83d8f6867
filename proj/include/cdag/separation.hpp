#pragma once

#include <set>
#include <utility>
#include <vector>

#include "cdag/admg.hpp"

namespace cdag {

namespace detail {
inline void check_query_sets(const Admg& g, const NodeSet& x, const NodeSet& y,
                             const NodeSet& z) {
  g.require(x);
  g.require(y);
  g.require(z);
  if (!disjoint(x, y) || !disjoint(x, z) || !disjoint(y, z))
    throw InvalidQueryError("separation query sets must be pairwise disjoint");
}
}  // namespace detail

/// m-separation (d-separation on mixed graphs) of X and Y given Z.
///
/// Reachability over (node, arrived-with-arrowhead) states. A node passes the
/// walk on as a collider iff it is in An(Z) ∪ Z, and as a non-collider iff it
/// is not in Z.
inline bool m_separated(const Admg& g, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
  detail::check_query_sets(g, x, y, z);
  if (x.empty() || y.empty()) return true;
  const NodeSet z_ancestral = ancestral_closure(g, z);

  // state: (node, head_at_node) where head_at_node says whether the edge we
  // arrived on has an arrowhead at node.
  std::set<std::pair<Name, bool>> visited;
  std::vector<std::pair<Name, bool>> stack;

  auto leave = [&](const Name& v, bool head_in, bool is_endpoint) {
    // Enumerate edges out of v with their mark at v and the mark at the other end.
    auto try_move = [&](const Name& w, bool head_at_v, bool head_at_w) {
      if (!is_endpoint) {
        const bool collider = head_in && head_at_v;
        if (collider && !z_ancestral.count(v)) return;
        if (!collider && z.count(v)) return;
      }
      if (visited.insert({w, head_at_w}).second) stack.emplace_back(w, head_at_w);
    };
    for (const auto& w : g.children_of(v)) try_move(w, false, true);
    for (const auto& w : g.parents_of(v)) try_move(w, true, false);
    for (const auto& w : g.siblings_of(v)) try_move(w, true, true);
  };

  for (const auto& s : x) leave(s, false, true);
  while (!stack.empty()) {
    auto [v, head_in] = stack.back();
    stack.pop_back();
    if (y.count(v)) return false;
    leave(v, head_in, false);
  }
  return true;
}

}  // namespace cdag
