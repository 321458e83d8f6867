#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cdag/cluster_dag.hpp"
#include "cdag/expansion.hpp"
#include "cdag/expr.hpp"

namespace cdag {

/// Non-identifiability witness: two R-rooted C-forests F' ⊆ F with F
/// intersecting the intervention set and F' avoiding it.
struct Hedge {
  NodeSet root_set;
  Admg forest_f;
  Admg forest_fprime;
  NodeSet intersected_x;
};

/// Q[S]: the post-intervention distribution of S under do(everything else).
struct QFactor {
  NodeSet scope;
  ProbExpr expr;
};

class IdResult {
 public:
  explicit IdResult(ProbExpr e) : value_(std::move(e)) {}
  explicit IdResult(Hedge h) : value_(std::move(h)) {}

  bool identified() const noexcept { return std::holds_alternative<ProbExpr>(value_); }
  const ProbExpr& expr() const { return std::get<ProbExpr>(value_); }
  const Hedge& hedge() const { return std::get<Hedge>(value_); }

 private:
  std::variant<ProbExpr, Hedge> value_;
};

namespace detail {

inline std::vector<Name> ordered(const NodeSet& s, const std::vector<Name>& order) {
  std::vector<Name> out;
  for (const auto& v : order)
    if (s.count(v)) out.push_back(v);
  return out;
}

inline void check_id_query(const Admg& g, const NodeSet& x, const NodeSet& y) {
  g.require(x);
  g.require(y);
  if (y.empty()) throw InvalidQueryError("identification needs a nonempty outcome set");
  if (x.empty()) throw EmptyInterventionError();
  if (!disjoint(x, y)) throw InvalidQueryError("intervention and outcome sets overlap");
}

/// Sum over `vars` unless there is nothing to sum.
inline ProbExpr sum_over(const NodeSet& vars, const std::vector<Name>& order, ProbExpr body) {
  if (vars.empty()) return body;
  return ProbExpr::sum(ordered(vars, order), std::move(body));
}

/// One child per non-root node, chosen by backwards BFS from `targets` over
/// directed edges inside `within`. Nodes already assigned keep their child.
inline void assign_children(const Admg& g, const NodeSet& within, const NodeSet& targets,
                            std::map<Name, Name>& child) {
  std::deque<Name> queue(targets.begin(), targets.end());
  NodeSet seen(targets.begin(), targets.end());
  while (!queue.empty()) {
    Name v = queue.front();
    queue.pop_front();
    for (const auto& p : g.parents_of(v)) {
      if (!within.count(p) || seen.count(p)) continue;
      seen.insert(p);
      child.emplace(p, v);
      queue.push_back(p);
    }
  }
}

inline Admg forest(const Admg& g, const NodeSet& nodes, const std::map<Name, Name>& child) {
  EdgeSet directed, bidirected;
  for (const auto& [v, w] : child)
    if (nodes.count(v)) directed.insert({v, w});
  for (const auto& e : g.bidirected_edges())
    if (nodes.count(e.first) && nodes.count(e.second)) bidirected.insert(e);
  return Admg(nodes, directed, bidirected);
}

/// Hedge for a failed Identify(C, T): T = An(C) in G[T], C ⊊ T.
inline Hedge hedge_from_failure(const Admg& g, const NodeSet& c, const NodeSet& t,
                                const NodeSet& x) {
  NodeSet roots;
  for (const auto& v : c) {
    bool has_child = false;
    for (const auto& w : g.children_of(v)) has_child = has_child || c.count(w);
    if (!has_child) roots.insert(v);
  }
  std::map<Name, Name> child;
  assign_children(g, c, roots, child);
  Admg fprime = forest(g, c, child);
  assign_children(g, t, c, child);
  Admg f = forest(g, t, child);
  return Hedge{roots, std::move(f), std::move(fprime), set_intersection(t, x)};
}

struct IdFailure {
  NodeSet c, t;
};

/// Identify(C, T, Q[T]) over G[T]; C ⊆ T is a c-component of G[C].
inline std::variant<ProbExpr, IdFailure> identify_within(const Admg& g, const NodeSet& c,
                                                         const NodeSet& t, const ProbExpr& q_t) {
  const Admg gt = induced_subgraph(g, t);
  const NodeSet a = ancestral_closure(gt, c);
  const auto& order = g.topological_order();
  if (a == c) return sum_over(set_difference(t, c), order, q_t);
  if (a == t) return IdFailure{c, t};

  const ProbExpr q_a = sum_over(set_difference(t, a), order, q_t);
  const Admg ga = induced_subgraph(g, a);
  const NodeSet t_next = c_component_of(ga, *c.begin());
  // Q[T'] = Π_{V_i ∈ T'} Q[H_i] / Q[H_{i-1}], H_i the first i nodes of A.
  const auto a_order = ordered(a, order);
  std::vector<ProbExpr> factors;
  NodeSet prefix;
  ProbExpr q_prev = ProbExpr::one();
  for (const auto& v : a_order) {
    prefix.insert(v);
    ProbExpr q_cur = sum_over(set_difference(a, prefix), order, q_a);
    if (t_next.count(v)) factors.push_back(ProbExpr::fraction(q_cur, q_prev));
    q_prev = q_cur;
  }
  return identify_within(g, c, t_next, ProbExpr::product(std::move(factors)));
}

}  // namespace detail

/// Q[S] = Π_{V_i ∈ S} P(v_i | v_1, ..., v_{i-1}) along the graph's topological
/// order, with each conditioning set cut down to (T_i ∪ Pa(T_i)) \ {V_i}, where
/// T_i is the c-component of V_i in the graph over V_1..V_i. `s` must be a
/// c-component of `g`.
inline QFactor q_factor(const Admg& g, const NodeSet& s) {
  g.require(s);
  bool is_component = false;
  for (const auto& comp : c_components(g)) is_component = is_component || comp == s;
  if (!is_component) throw InvalidQueryError("q_factor: scope is not a c-component");
  const auto& order = g.topological_order();
  std::vector<ProbExpr> factors;
  NodeSet prefix;
  for (const auto& v : order) {
    prefix.insert(v);
    if (!s.count(v)) continue;
    const NodeSet ti = c_component_of(induced_subgraph(g, prefix), v);
    NodeSet given = set_union(ti, parents(g, ti));
    given.erase(v);
    factors.push_back(ProbExpr::prob({v}, detail::ordered(given, order)));
  }
  return QFactor{s, factors.size() == 1 ? factors.front() : ProbExpr::product(std::move(factors))};
}

inline QFactor q_factor(const ClusterDag& c, const NodeSet& s) { return q_factor(c.graph, s); }

/// D = An(Y) ∪ Y in G[V \ X].
inline NodeSet ancestral_reduce(const Admg& g, const NodeSet& x, const NodeSet& y) {
  g.require(x);
  g.require(y);
  return ancestral_closure(induced_subgraph(g, set_difference(g.nodes(), x)), y);
}

inline NodeSet ancestral_reduce(const ClusterDag& c, const NodeSet& x, const NodeSet& y) {
  return ancestral_reduce(c.graph, x, y);
}

/// P(y | do(x)) from the observational distribution over the nodes of `g`, or
/// a hedge when the effect is not identifiable. The formula's free variables
/// are exactly x ∪ y.
inline IdResult identify(const Admg& g, const NodeSet& x, const NodeSet& y) {
  detail::check_id_query(g, x, y);
  // Non-ancestors of Y can be marginalized out up front.
  const Admg ga = induced_subgraph(g, ancestral_closure(g, y));
  const NodeSet xa = set_intersection(x, ga.nodes());
  const auto& order = ga.topological_order();
  const NodeSet d = ancestral_closure(induced_subgraph(ga, set_difference(ga.nodes(), xa)), y);
  const auto d_components = c_components(induced_subgraph(ga, d));
  const auto s_components = c_components(ga);

  std::vector<ProbExpr> factors;
  for (const auto& di : d_components) {
    const NodeSet* sj = nullptr;
    for (const auto& s : s_components)
      if (s.count(*di.begin())) sj = &s;
    auto r = detail::identify_within(ga, di, *sj, q_factor(ga, *sj).expr);
    if (auto* fail = std::get_if<detail::IdFailure>(&r))
      return IdResult(detail::hedge_from_failure(ga, fail->c, fail->t, x));
    factors.push_back(std::get<ProbExpr>(std::move(r)));
  }
  ProbExpr raw = detail::sum_over(set_difference(d, y), order,
                                  factors.size() == 1 ? factors.front()
                                                      : ProbExpr::product(std::move(factors)));
  // Variables outside x ∪ y that survive are ones the effect does not depend
  // on; average them out under their marginal.
  const NodeSet extra = set_difference(raw.free_variables(), set_union(x, y));
  if (!extra.empty())
    raw = detail::sum_over(extra, order,
                           ProbExpr::product({ProbExpr::prob(detail::ordered(extra, order)), raw}));
  return IdResult(simplify(freshen_bound(raw)));
}

inline IdResult identify(const ClusterDag& c, const NodeSet& x, const NodeSet& y) {
  return identify(c.graph, x, y);
}

namespace detail {

inline bool single_c_component(const Admg& f) {
  return f.nodes().empty() || c_components(f).size() == 1;
}

inline NodeSet root_set(const Admg& f) {
  NodeSet out;
  for (const auto& v : f.nodes())
    if (f.children_of(v).empty()) out.insert(v);
  return out;
}

inline bool is_r_rooted_c_forest(const Admg& g, const Admg& f, const NodeSet& r) {
  if (!is_subset(f.nodes(), g.nodes())) return false;
  for (const auto& e : f.directed_edges())
    if (!g.has_directed(e.first, e.second)) return false;
  for (const auto& e : f.bidirected_edges())
    if (!g.has_bidirected(e.first, e.second)) return false;
  for (const auto& v : f.nodes())
    if (f.children_of(v).size() > 1) return false;
  return single_c_component(f) && root_set(f) == r && !r.empty();
}

}  // namespace detail

/// Empty string when `h` is a valid hedge for P(y|do(x)) in `g`, otherwise the
/// first violated condition.
inline std::string hedge_violation(const Admg& g, const NodeSet& x, const NodeSet& y,
                                   const Hedge& h) {
  if (!detail::is_r_rooted_c_forest(g, h.forest_f, h.root_set)) return "F is not an R-rooted C-forest";
  if (!detail::is_r_rooted_c_forest(g, h.forest_fprime, h.root_set))
    return "F' is not an R-rooted C-forest";
  if (!is_subset(h.forest_fprime.nodes(), h.forest_f.nodes()))
    return "F' is not contained in F";
  for (const auto& e : h.forest_fprime.directed_edges())
    if (!h.forest_f.has_directed(e.first, e.second)) return "F' has an edge missing from F";
  for (const auto& e : h.forest_fprime.bidirected_edges())
    if (!h.forest_f.has_bidirected(e.first, e.second)) return "F' has an edge missing from F";
  if (!disjoint(h.forest_fprime.nodes(), x)) return "F' intersects X";
  if (disjoint(h.forest_f.nodes(), x)) return "F does not intersect X";
  if (h.intersected_x != set_intersection(h.forest_f.nodes(), x)) return "intersected_x is wrong";
  if (!is_subset(h.root_set, ancestral_closure(mutilate(g, x, {}), y)))
    return "R is not within An(Y) of the X-mutilated graph";
  return {};
}

inline std::string hedge_violation(const ClusterDag& c, const NodeSet& x, const NodeSet& y,
                                   const Hedge& h) {
  return hedge_violation(c.graph, x, y, h);
}

/// The hedge witnessing non-identifiability; throws NotApplicableError when
/// the effect is identifiable.
inline Hedge find_hedge(const Admg& g, const NodeSet& x, const NodeSet& y) {
  auto r = identify(g, x, y);
  if (r.identified()) throw NotApplicableError("effect is identifiable; no hedge exists");
  const std::string why = hedge_violation(g, x, y, r.hedge());
  if (!why.empty()) throw Error("internal error: extracted hedge is invalid: " + why);
  return r.hedge();
}

inline Hedge find_hedge(const ClusterDag& c, const NodeSet& x, const NodeSet& y) {
  return find_hedge(c.graph, x, y);
}

/// A compatible diagram in which the hedge survives: clusters expand to
/// chains with parallel bidirected edges and cross pairs are fully wired.
inline Expansion hedge_expansion_witness(const ClusterDag& c, const Hedge& h,
                                         const ClusterSizes& sizes) {
  if (!is_subset(h.forest_f.nodes(), c.clusters()))
    throw NotApplicableError("hedge does not belong to this C-DAG");
  return chain_expansion(c, sizes);
}

}  // namespace cdag
