#pragma once

#include <cctype>
#include <sstream>
#include <string>

#include "cdag/cluster_dag.hpp"

namespace cdag {

/// Disjoint cluster sets for a do-calculus rule: P(y | do(x), z, w).
struct DoQuery {
  NodeSet x, y, z, w;
};

enum class Rule { R1 = 1, R2 = 2, R3 = 3 };

struct RuleVerdict {
  Rule rule;
  bool applies = false;
  /// Mutilated graph and the separation statement that was checked.
  std::string separation_tested;
  /// The licensed equality; empty when the rule does not apply.
  std::string equality_granted;
  /// Rule 3 only: the Z-clusters that are not ancestors of any W-cluster.
  NodeSet z_of_w;
};

namespace detail {

inline std::string lower_list(const NodeSet& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ",";
    for (char ch : v) out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return out;
}

inline std::string set_text(const NodeSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& v : s) {
    if (!first) out += ",";
    out += v;
    first = false;
  }
  return out + "}";
}

/// "P(y | do(x), z, w)" with empty parts dropped.
inline std::string prob_text(const NodeSet& y, const NodeSet& do_set, const NodeSet& given) {
  std::string out = "P(" + lower_list(y);
  std::string cond;
  if (!do_set.empty()) cond += "do(" + lower_list(do_set) + ")";
  if (!given.empty()) {
    if (!cond.empty()) cond += ",";
    cond += lower_list(given);
  }
  if (!cond.empty()) out += "|" + cond;
  return out + ")";
}

inline void validate(const ClusterDag& c, const DoQuery& q) {
  for (const auto* s : {&q.x, &q.y, &q.z, &q.w}) c.graph.require(*s);
  const NodeSet* sets[] = {&q.x, &q.y, &q.z, &q.w};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (!disjoint(*sets[i], *sets[j]))
        throw InvalidQueryError("do-calculus query sets must be pairwise disjoint");
  if (q.y.empty()) throw InvalidQueryError("do-calculus query needs a nonempty Y");
}

inline std::string separation_text(const std::string& graph, const DoQuery& q) {
  return "(" + set_text(q.y) + " _||_ " + set_text(q.z) + " | " +
         set_text(set_union(q.x, q.w)) + ") in " + graph;
}

}  // namespace detail

/// Insertion/deletion of observations.
inline RuleVerdict rule1(const ClusterDag& c, const DoQuery& q) {
  detail::validate(c, q);
  const auto g = mutilate_cdag(c, q.x, {});
  RuleVerdict v{Rule::R1, false, {}, {}, {}};
  v.applies = cdag_d_separated(g, q.y, q.z, set_union(q.x, q.w));
  v.separation_tested = detail::separation_text("G[cut into " + detail::set_text(q.x) + "]", q);
  if (v.applies)
    v.equality_granted = detail::prob_text(q.y, q.x, set_union(q.z, q.w)) + " = " +
                         detail::prob_text(q.y, q.x, q.w);
  return v;
}

/// Action/observation exchange.
inline RuleVerdict rule2(const ClusterDag& c, const DoQuery& q) {
  detail::validate(c, q);
  const auto g = mutilate_cdag(c, q.x, q.z);
  RuleVerdict v{Rule::R2, false, {}, {}, {}};
  v.applies = cdag_d_separated(g, q.y, q.z, set_union(q.x, q.w));
  v.separation_tested = detail::separation_text(
      "G[cut into " + detail::set_text(q.x) + ", out of " + detail::set_text(q.z) + "]", q);
  if (v.applies)
    v.equality_granted = detail::prob_text(q.y, set_union(q.x, q.z), q.w) + " = " +
                         detail::prob_text(q.y, q.x, set_union(q.z, q.w));
  return v;
}

/// Insertion/deletion of actions. Z(W) is computed from cluster-level
/// ancestors in the X-mutilated C-DAG.
inline RuleVerdict rule3(const ClusterDag& c, const DoQuery& q) {
  detail::validate(c, q);
  const auto gx = mutilate_cdag(c, q.x, {});
  const NodeSet w_ancestors = ancestors(gx.graph, q.w);
  RuleVerdict v{Rule::R3, false, {}, {}, {}};
  for (const auto& zi : q.z)
    if (!w_ancestors.count(zi)) v.z_of_w.insert(zi);
  const auto g = mutilate_cdag(c, set_union(q.x, v.z_of_w), {});
  v.applies = cdag_d_separated(g, q.y, q.z, set_union(q.x, q.w));
  v.separation_tested = detail::separation_text(
      "G[cut into " + detail::set_text(set_union(q.x, v.z_of_w)) + "]", q);
  if (v.applies)
    v.equality_granted = detail::prob_text(q.y, set_union(q.x, q.z), q.w) + " = " +
                         detail::prob_text(q.y, q.x, q.w);
  return v;
}

inline RuleVerdict apply_rule(Rule r, const ClusterDag& c, const DoQuery& q) {
  switch (r) {
    case Rule::R1: return rule1(c, q);
    case Rule::R2: return rule2(c, q);
    case Rule::R3: return rule3(c, q);
  }
  throw InvalidQueryError("unknown rule");
}

}  // namespace cdag
