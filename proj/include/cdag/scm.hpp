#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cdag/oracle.hpp"

namespace cdag {

/// One term of a counterfactual conjunction: `target` holds in the submodel
/// where `intervention` is forced. An empty intervention is the factual world.
struct CfEvent {
  Assignment intervention;
  Assignment target;
};

namespace detail {

/// Calls fn(u, P(u)) for every joint value of the exogenous variables.
template <typename Fn>
void for_each_exogenous(const DiscreteCbn& m, Fn&& fn) {
  const auto& exo = m.exogenous();
  double states = 1.0;
  for (const auto& e : exo) states *= static_cast<double>(e.probs.size());
  check_cap(states, "exogenous enumeration");
  std::vector<int> u(exo.size(), 0);
  for (;;) {
    double w = 1.0;
    for (std::size_t e = 0; e < exo.size(); ++e) w *= exo[e].probs[u[e]];
    fn(static_cast<const std::vector<int>&>(u), w);
    std::size_t k = exo.size();
    while (k-- > 0) {
      if (++u[k] < static_cast<int>(exo[k].probs.size())) break;
      u[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) return;
  }
}

inline void require_deterministic(const DiscreteCbn& m) {
  if (m.mode() != MechanismMode::Deterministic)
    throw NotApplicableError(
        "counterfactuals need deterministic mechanisms; build the model in deterministic mode");
}

}  // namespace detail

/// Potential response V_x(u) of every variable.
inline Assignment solve(const DiscreteCbn& m, const std::vector<int>& u, const Assignment& x) {
  detail::require_deterministic(m);
  Assignment val;
  auto lookup = [&](const Name& v) { return val.at(v); };
  for (const auto& v : m.graph().topological_order()) {
    if (auto it = x.find(v); it != x.end()) {
      val[v] = it->second;
      continue;
    }
    val[v] = m.respond(v, m.row(v, lookup, u), u[m.mechanism(v).private_exo]);
  }
  return val;
}

/// P(every event holds) = Σ_u P(u) · 1[∀ events: target_x(u) = target].
inline double counterfactual_prob(const DiscreteCbn& m, const std::vector<CfEvent>& events) {
  detail::require_deterministic(m);
  for (const auto& ev : events) {
    detail::check_assignment(m, ev.intervention);
    detail::check_assignment(m, ev.target);
  }
  double total = 0.0;
  detail::for_each_exogenous(m, [&](const std::vector<int>& u, double w) {
    for (const auto& ev : events) {
      const Assignment val = solve(m, u, ev.intervention);
      for (const auto& [v, x] : ev.target)
        if (val.at(v) != x) return;
    }
    total += w;
  });
  return total;
}

/// Mechanism of a macro variable: a table from (parent-cluster states...,
/// exogenous values...) to the cluster's state, mixed radix with last fastest.
struct MacroMechanism {
  std::vector<Name> parents;  // parent clusters in name order
  std::vector<int> exo;       // exogenous indices of the base model, ascending
  std::vector<int> table;
};

/// Cluster-level SCM obtained by substituting each cluster's internal
/// mechanisms into one another along the cluster's topological order. Cluster
/// states encode member values in mixed radix (members in name order, last
/// fastest), the same encoding JointTable::group uses.
class MacroScm {
 public:
  MacroScm(DiscreteCbn base, Partition partition)
      : base_(std::move(base)), partition_(std::move(partition)) {
    detail::require_deterministic(base_);
    partition_.check_covers(base_.graph().nodes());
    order_ = build_cdag(base_.graph(), partition_).graph.topological_order();
    for (const auto& b : partition_.blocks()) {
      int k = 1;
      for (const auto& v : b.members) k *= base_.card(v);
      cards_[b.cluster] = k;
    }
    for (const auto& b : partition_.blocks()) build(b.cluster);
  }

  const DiscreteCbn& base() const noexcept { return base_; }
  const Partition& partition() const noexcept { return partition_; }
  const std::map<Name, int>& cards() const noexcept { return cards_; }
  const MacroMechanism& mechanism(const Name& c) const { return mech_.at(c); }

  /// Cluster state of the member values in `val`.
  int encode(const Name& cluster, const Assignment& val) const {
    int code = 0;
    for (const auto& v : partition_.members(cluster)) code = code * base_.card(v) + val.at(v);
    return code;
  }

  /// Member values of a cluster state.
  Assignment decode(const Name& cluster, int state) const {
    if (state < 0 || state >= cards_.at(cluster))
      throw InvalidQueryError("state " + std::to_string(state) + " out of range for '" + cluster + "'");
    Assignment out;
    const auto& members = partition_.members(cluster);
    for (auto it = members.rbegin(); it != members.rend(); ++it) {
      out[*it] = state % base_.card(*it);
      state /= base_.card(*it);
    }
    return out;
  }

  /// The diagram the macro mechanisms induce: C_j → C_k when C_j feeds C_k's
  /// table, C_j ↔ C_k when their tables share an exogenous variable.
  Admg induced_graph() const {
    EdgeSet directed, bidirected;
    std::map<int, NodeSet> users;
    for (const auto& [c, mm] : mech_) {
      for (const auto& p : mm.parents) directed.insert({p, c});
      for (int e : mm.exo) users[e].insert(c);
    }
    for (const auto& [e, cs] : users)
      for (const auto& a : cs)
        for (const auto& b : cs)
          if (a < b) bidirected.insert({a, b});
    return Admg(partition_.clusters(), directed, bidirected);
  }

  /// Cluster states C̃_x(u) of every cluster.
  std::map<Name, int> solve(const std::vector<int>& u, const std::map<Name, int>& x) const {
    std::map<Name, int> val;
    for (const auto& c : order_) {
      if (auto it = x.find(c); it != x.end()) {
        val[c] = it->second;
        continue;
      }
      const MacroMechanism& mm = mech_.at(c);
      std::size_t r = 0;
      for (const auto& p : mm.parents) r = r * cards_.at(p) + val.at(p);
      for (int e : mm.exo) r = r * base_.exogenous()[e].probs.size() + u[e];
      val[c] = mm.table[r];
    }
    return val;
  }

 private:
  void build(const Name& cluster) {
    const auto& members = partition_.members(cluster);
    MacroMechanism mm;
    NodeSet parents;
    std::set<int> exo;
    for (const auto& v : members) {
      for (const auto& p : base_.graph().parents_of(v))
        if (!members.count(p)) parents.insert(partition_.cluster_of(p));
      const Mechanism& m = base_.mechanism(v);
      exo.insert(m.shared.begin(), m.shared.end());
      exo.insert(m.private_exo);
    }
    mm.parents.assign(parents.begin(), parents.end());
    mm.exo.assign(exo.begin(), exo.end());
    std::vector<int> radix;
    for (const auto& p : mm.parents) radix.push_back(cards_.at(p));
    for (int e : mm.exo) radix.push_back(static_cast<int>(base_.exogenous()[e].probs.size()));
    const std::size_t rows = JointTable::product(radix);
    detail::check_cap(static_cast<double>(rows), "macro mechanism table");

    std::vector<Name> internal;
    for (const auto& v : base_.graph().topological_order())
      if (members.count(v)) internal.push_back(v);
    std::vector<int> u(base_.exogenous().size(), 0);
    std::vector<int> digits(radix.size());
    mm.table.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t rest = r;
      for (std::size_t k = radix.size(); k-- > 0;) {
        digits[k] = static_cast<int>(rest % radix[k]);
        rest /= radix[k];
      }
      Assignment val;
      for (std::size_t k = 0; k < mm.parents.size(); ++k) {
        const Assignment d = decode(mm.parents[k], digits[k]);
        val.insert(d.begin(), d.end());
      }
      for (std::size_t k = 0; k < mm.exo.size(); ++k) u[mm.exo[k]] = digits[mm.parents.size() + k];
      auto lookup = [&](const Name& v) { return val.at(v); };
      // Each member's mechanism is replaced by its own function of the
      // already-solved members, recursively along the internal order.
      for (const auto& v : internal)
        val[v] = base_.respond(v, base_.row(v, lookup, u), u[base_.mechanism(v).private_exo]);
      mm.table[r] = encode(cluster, val);
    }
    mech_.emplace(cluster, std::move(mm));
  }

  DiscreteCbn base_;
  Partition partition_;
  std::vector<Name> order_;
  std::map<Name, int> cards_;
  std::map<Name, MacroMechanism> mech_;
};

inline MacroScm build_macro_scm(const DiscreteCbn& m, const Partition& p) { return MacroScm(m, p); }

/// Counterfactual probability of cluster-level events (cluster names, cluster
/// states), enumerating the base model's exogenous variables.
inline double counterfactual_prob(const MacroScm& s, const std::vector<CfEvent>& events) {
  for (const auto& ev : events)
    for (const auto* a : {&ev.intervention, &ev.target})
      for (const auto& [c, x] : *a) s.decode(c, x);  // validates name and range
  double total = 0.0;
  detail::for_each_exogenous(s.base(), [&](const std::vector<int>& u, double w) {
    for (const auto& ev : events) {
      const auto val = s.solve(u, ev.intervention);
      for (const auto& [c, x] : ev.target)
        if (val.at(c) != x) return;
    }
    total += w;
  });
  return total;
}

/// The variable-level event equivalent to a cluster-level one.
inline CfEvent lift_event(const MacroScm& s, const CfEvent& cluster_event) {
  CfEvent out;
  for (const auto& [c, x] : cluster_event.intervention) {
    const Assignment d = s.decode(c, x);
    out.intervention.insert(d.begin(), d.end());
  }
  for (const auto& [c, x] : cluster_event.target) {
    const Assignment d = s.decode(c, x);
    out.target.insert(d.begin(), d.end());
  }
  return out;
}

}  // namespace cdag
