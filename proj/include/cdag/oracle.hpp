#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdag/cluster_dag.hpp"
#include "cdag/joint_table.hpp"
#include "cdag/rng.hpp"

namespace cdag {

/// Stochastic: CPTs given (endogenous parents, shared exogenous parents), with
/// private noise absorbed. Deterministic: each variable also has a private
/// exogenous parent and a functional mechanism, which is what counterfactual
/// queries need.
enum class MechanismMode { Stochastic, Deterministic };

struct Exogenous {
  Name name;
  std::vector<double> probs;
  NodeSet children;
};

/// Mechanism of one endogenous variable. Rows are indexed in mixed radix over
/// (parent values..., shared exogenous values...), last fastest.
struct Mechanism {
  std::vector<Name> parents;
  std::vector<int> shared;  // indices into the model's exogenous list
  std::vector<double> cpt;  // rows * card entries
  int private_exo = -1;     // deterministic mode only
  std::vector<int> shift;   // deterministic mode: v = (u_private + shift[row]) mod card
};

inline std::size_t state_cap() {
  if (const char* env = std::getenv("CDAG_STATE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 22;
}

namespace detail {

inline void check_cap(double states, const std::string& what) {
  if (states > static_cast<double>(state_cap()))
    throw StateSpaceError(what + " needs " + std::to_string(static_cast<long long>(states)) +
                          " states, above the cap of " + std::to_string(state_cap()) +
                          " (set CDAG_STATE_CAP to raise it)");
}

}  // namespace detail

/// A fully parameterized discrete causal model over an ADMG: one exogenous
/// variable per bidirected edge, shared by exactly its two endpoints.
class DiscreteCbn {
 public:
  DiscreteCbn(Admg graph, std::map<Name, int> cards, std::vector<Exogenous> exogenous,
              std::map<Name, Mechanism> mechanisms, MechanismMode mode)
      : graph_(std::move(graph)),
        cards_(std::move(cards)),
        exo_(std::move(exogenous)),
        mech_(std::move(mechanisms)),
        mode_(mode) {
    for (const auto& v : graph_.nodes()) {
      auto it = cards_.find(v);
      if (it == cards_.end() || it->second < 2)
        throw InvalidQueryError("cardinality of '" + v + "' must be given and >= 2");
      if (!mech_.count(v)) throw InvalidGraphError("no mechanism for '" + v + "'");
      vars_.push_back(v);
    }
    if (cards_.size() != vars_.size() || mech_.size() != vars_.size())
      throw InvalidGraphError("cardinalities or mechanisms name unknown variables");
    validate_exogenous();
    for (const auto& v : vars_) validate_mechanism(v);
  }

  const Admg& graph() const noexcept { return graph_; }
  MechanismMode mode() const noexcept { return mode_; }
  const std::vector<Name>& variables() const noexcept { return vars_; }
  const std::map<Name, int>& cards() const noexcept { return cards_; }
  int card(const Name& v) const { return cards_.at(v); }
  const std::vector<Exogenous>& exogenous() const noexcept { return exo_; }
  const Mechanism& mechanism(const Name& v) const { return mech_.at(v); }

  std::vector<int> card_vector() const {
    std::vector<int> out;
    for (const auto& v : vars_) out.push_back(cards_.at(v));
    return out;
  }

  /// Row of v's mechanism for endogenous values `val` (looked up by name) and
  /// exogenous values `u` (indexed like exogenous()).
  template <typename Lookup>
  std::size_t row(const Name& v, Lookup&& val, const std::vector<int>& u) const {
    const Mechanism& m = mech_.at(v);
    std::size_t r = 0;
    for (const auto& p : m.parents) r = r * cards_.at(p) + val(p);
    for (int e : m.shared) r = r * exo_[e].probs.size() + u[e];
    return r;
  }

  /// P(v = value | row).
  double cpt(const Name& v, std::size_t row, int value) const {
    return mech_.at(v).cpt[row * cards_.at(v) + value];
  }

  /// Deterministic response of v in `row` given its private noise value.
  int respond(const Name& v, std::size_t row, int u_private) const {
    const Mechanism& m = mech_.at(v);
    if (mode_ != MechanismMode::Deterministic)
      throw NotApplicableError("mechanisms are stochastic; counterfactuals need deterministic mode");
    return (u_private + m.shift[row]) % cards_.at(v);
  }

 private:
  void validate_exogenous() const {
    std::map<Edge, int> seen;
    for (std::size_t i = 0; i < exo_.size(); ++i) {
      const auto& e = exo_[i];
      double s = 0.0;
      for (double p : e.probs) {
        if (!(p > 0.0)) throw InvalidGraphError("exogenous '" + e.name + "' is not strictly positive");
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-12) throw InvalidGraphError("exogenous '" + e.name + "' does not sum to 1");
      if (e.children.size() == 2) {
        const Edge key = canonical_bidirected(*e.children.begin(), *e.children.rbegin());
        if (!graph_.has_bidirected(key.first, key.second))
          throw InvalidGraphError("exogenous '" + e.name + "' is shared by non-confounded variables");
        ++seen[key];
      } else if (e.children.size() != 1 || mode_ != MechanismMode::Deterministic) {
        throw InvalidGraphError("exogenous '" + e.name + "' must be shared by one bidirected pair");
      }
    }
    for (const auto& e : graph_.bidirected_edges())
      if (seen[e] != 1) throw InvalidGraphError("each bidirected edge needs exactly one exogenous variable");
  }

  void validate_mechanism(const Name& v) const {
    const Mechanism& m = mech_.at(v);
    const auto& pa = graph_.parents_of(v);
    if (NodeSet(m.parents.begin(), m.parents.end()) != pa || m.parents.size() != pa.size())
      throw InvalidGraphError("mechanism parents of '" + v + "' differ from the graph");
    std::size_t rows = 1;
    for (const auto& p : m.parents) rows *= cards_.at(p);
    NodeSet partners;
    for (int e : m.shared) {
      if (e < 0 || e >= static_cast<int>(exo_.size()) || exo_[e].children.size() != 2 ||
          !exo_[e].children.count(v))
        throw InvalidGraphError("bad shared exogenous parent of '" + v + "'");
      rows *= exo_[e].probs.size();
      for (const auto& w : exo_[e].children)
        if (w != v) partners.insert(w);
    }
    if (partners != graph_.siblings_of(v))
      throw InvalidGraphError("shared exogenous parents of '" + v + "' do not match its bidirected edges");
    const int k = cards_.at(v);
    if (m.cpt.size() != rows * k) throw InvalidGraphError("CPT of '" + v + "' has the wrong size");
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) {
        if (!(m.cpt[r * k + j] > 0.0))
          throw InvalidGraphError("CPT row of '" + v + "' is not strictly positive");
        s += m.cpt[r * k + j];
      }
      if (std::abs(s - 1.0) > 1e-12) throw InvalidGraphError("CPT row of '" + v + "' does not sum to 1");
    }
    if (mode_ == MechanismMode::Deterministic) {
      if (m.private_exo < 0 || m.private_exo >= static_cast<int>(exo_.size()) ||
          exo_[m.private_exo].children != NodeSet{v} ||
          static_cast<int>(exo_[m.private_exo].probs.size()) != k || m.shift.size() != rows)
        throw InvalidGraphError("deterministic mechanism of '" + v + "' is malformed");
      const auto& pu = exo_[m.private_exo].probs;
      for (std::size_t r = 0; r < rows; ++r)
        for (int j = 0; j < k; ++j)
          if (std::abs(m.cpt[r * k + j] - pu[((j - m.shift[r]) % k + k) % k]) > 1e-12)
            throw InvalidGraphError("CPT of '" + v + "' disagrees with its mechanism");
    }
  }

  Admg graph_;
  std::map<Name, int> cards_;
  std::vector<Exogenous> exo_;
  std::map<Name, Mechanism> mech_;
  MechanismMode mode_;
  std::vector<Name> vars_;
};

/// Random model with Dirichlet(1) CPT rows floored at 1e-6; binary exogenous
/// variables. Reproducible from `seed`.
inline DiscreteCbn random_cbn(const Admg& g, const std::map<Name, int>& cards, std::uint64_t seed,
                              MechanismMode mode = MechanismMode::Stochastic) {
  for (const auto& [v, k] : cards) {
    if (!g.has_node(v)) throw UnknownNodeError(v);
    if (k < 2) throw InvalidQueryError("cardinality of '" + v + "' must be >= 2");
  }
  for (const auto& v : g.nodes())
    if (!cards.count(v)) throw InvalidQueryError("no cardinality for '" + v + "'");

  Rng rng(seed);
  std::vector<Exogenous> exo;
  std::map<Edge, int> edge_exo;
  for (const auto& [a, b] : g.bidirected_edges()) {
    edge_exo[{a, b}] = static_cast<int>(exo.size());
    exo.push_back({"U[" + a + "<->" + b + "]", rng.dirichlet1(2), {a, b}});
  }
  std::map<Name, Mechanism> mech;
  for (const auto& v : g.nodes()) {
    Mechanism m;
    m.parents.assign(g.parents_of(v).begin(), g.parents_of(v).end());
    std::size_t rows = 1;
    for (const auto& p : m.parents) rows *= cards.at(p);
    for (const auto& [e, idx] : edge_exo)
      if (e.first == v || e.second == v) {
        m.shared.push_back(idx);
        rows *= 2;
      }
    const int k = cards.at(v);
    if (mode == MechanismMode::Stochastic) {
      for (std::size_t r = 0; r < rows; ++r) {
        auto p = rng.dirichlet1(k);
        m.cpt.insert(m.cpt.end(), p.begin(), p.end());
      }
    } else {
      m.private_exo = static_cast<int>(exo.size());
      exo.push_back({"U[" + v + "]", rng.dirichlet1(k), {v}});
      const auto& pu = exo.back().probs;
      for (std::size_t r = 0; r < rows; ++r) {
        m.shift.push_back(static_cast<int>(rng.below(static_cast<std::size_t>(k))));
        for (int j = 0; j < k; ++j) m.cpt.push_back(pu[((j - m.shift.back()) % k + k) % k]);
      }
    }
    mech.emplace(v, std::move(m));
  }
  return DiscreteCbn(g, cards, std::move(exo), std::move(mech), mode);
}

/// All variables binary.
inline DiscreteCbn random_cbn(const Admg& g, std::uint64_t seed,
                              MechanismMode mode = MechanismMode::Stochastic) {
  std::map<Name, int> cards;
  for (const auto& v : g.nodes()) cards[v] = 2;
  return random_cbn(g, cards, seed, mode);
}

namespace detail {

inline void check_assignment(const DiscreteCbn& m, const Assignment& x) {
  for (const auto& [v, val] : x) {
    if (!m.graph().has_node(v)) throw UnknownNodeError(v);
    if (val < 0 || val >= m.card(v))
      throw InvalidQueryError("value " + std::to_string(val) + " out of range for '" + v + "'");
  }
}

/// A factor over local variable ids (sorted), last id fastest.
struct LocalFactor {
  std::vector<int> vars;
  std::vector<double> table;

  std::size_t index(const std::vector<int>& val, const std::vector<int>& cards) const {
    std::size_t i = 0;
    for (int v : vars) i = i * cards[v] + val[v];
    return i;
  }
};

/// Table of f over the assignments of `vars` (sorted ids), last fastest; `f`
/// sees a full-length value vector in which only `vars` are meaningful.
template <typename F>
std::vector<double> tabulate(const std::vector<int>& vars, const std::vector<int>& cards, F&& f) {
  std::size_t n = 1;
  for (int v : vars) n *= cards[v];
  std::vector<double> out(n);
  std::vector<int> val(cards.size(), 0);
  for (std::size_t s = 0; s < n; ++s) {
    out[s] = f(val);
    for (std::size_t k = vars.size(); k-- > 0;) {
      if (++val[vars[k]] < cards[vars[k]]) break;
      val[vars[k]] = 0;
    }
  }
  return out;
}

inline std::vector<int> merged_vars(const std::vector<LocalFactor>& fs, int z) {
  std::vector<int> u;
  for (const auto& f : fs)
    if (std::binary_search(f.vars.begin(), f.vars.end(), z)) u.insert(u.end(), f.vars.begin(), f.vars.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

inline double merged_size(const std::vector<LocalFactor>& fs, int z, const std::vector<int>& cards) {
  double size = 1.0;
  for (int v : merged_vars(fs, z)) size *= cards[v];
  return size;
}

/// Multiplies the factors mentioning z and sums z out.
inline std::vector<LocalFactor> eliminate(std::vector<LocalFactor> fs, int z, const std::vector<int>& cards) {
  const std::vector<int> scope = merged_vars(fs, z);
  std::vector<LocalFactor> keep, join;
  for (auto& f : fs)
    (std::binary_search(f.vars.begin(), f.vars.end(), z) ? join : keep).push_back(std::move(f));
  LocalFactor out;
  for (int v : scope)
    if (v != z) out.vars.push_back(v);
  out.table = tabulate(out.vars, cards, [&](const std::vector<int>& fixed) {
    std::vector<int> val = fixed;
    double total = 0.0;
    for (int k = 0; k < cards[z]; ++k) {
      val[z] = k;
      double p = 1.0;
      for (const auto& f : join) {
        p *= f.table[f.index(val, cards)];
        if (p == 0.0) break;
      }
      total += p;
    }
    return total;
  });
  keep.push_back(std::move(out));
  return keep;
}

/// Σ_u Π_i P(v_i | pa_i, u_i) over all variables, with the factors of the
/// variables in `x` replaced by point masses. Exogenous variables are summed
/// within each group of `groups`; every bidirected edge must lie inside one
/// group, and every variable must belong to exactly one group.
inline JointTable grouped_joint(const DiscreteCbn& m, const std::vector<NodeSet>& groups,
                                const Assignment& x) {
  const auto& vars = m.variables();
  const auto cards = m.card_vector();
  detail::check_cap(static_cast<double>(JointTable::product(cards)), "joint table");
  std::map<Name, std::size_t> pos;
  for (std::size_t i = 0; i < vars.size(); ++i) pos[vars[i]] = i;

  struct Factor {
    std::vector<std::size_t> scope;  // positions into vars
    std::vector<int> scope_cards;
    std::vector<double> table;
  };
  std::vector<Factor> factors;
  for (const auto& group : groups) {
    NodeSet scope_names = group;
    for (const auto& v : group) {
      const auto& pa = m.graph().parents_of(v);
      scope_names.insert(pa.begin(), pa.end());
    }
    std::vector<int> shared;
    for (std::size_t e = 0; e < m.exogenous().size(); ++e) {
      const auto& ch = m.exogenous()[e].children;
      if (ch.size() != 2) continue;
      const bool a = group.count(*ch.begin()) > 0, b = group.count(*ch.rbegin()) > 0;
      if (a != b) throw Error("internal error: confounded pair split across groups");
      if (a) shared.push_back(static_cast<int>(e));
    }
    Factor f;
    for (const auto& v : scope_names) {
      f.scope.push_back(pos.at(v));
      f.scope_cards.push_back(cards[pos.at(v)]);
    }
    const std::size_t n = JointTable::product(f.scope_cards);
    detail::check_cap(static_cast<double>(n), "joint table");

    // Sum-product over the shared exogenous variables by elimination: local
    // ids 0..scope-1 are endogenous, the rest are exogenous.
    std::map<Name, int> id;
    std::vector<int> id_cards = f.scope_cards;
    for (std::size_t k = 0; k < f.scope.size(); ++k) id[vars[f.scope[k]]] = static_cast<int>(k);
    std::map<int, int> exo_id;
    std::vector<LocalFactor> work;
    for (int e : shared) {
      exo_id[e] = static_cast<int>(id_cards.size());
      id_cards.push_back(static_cast<int>(m.exogenous()[e].probs.size()));
      work.push_back({{exo_id[e]}, m.exogenous()[e].probs});
    }
    for (const auto& v : group) {
      const Mechanism& mech = m.mechanism(v);
      LocalFactor lf;
      lf.vars.push_back(id.at(v));
      for (const auto& p : mech.parents) lf.vars.push_back(id.at(p));
      for (int e : mech.shared) lf.vars.push_back(exo_id.at(e));
      std::vector<int> raw = lf.vars;  // mechanism order: v, parents, shared
      std::sort(lf.vars.begin(), lf.vars.end());
      const auto it = x.find(v);
      lf.table = tabulate(lf.vars, id_cards, [&](const std::vector<int>& val) {
        const int own = val[raw[0]];
        if (it != x.end()) return own == it->second ? 1.0 : 0.0;
        std::size_t r = 0;
        for (std::size_t k = 1; k < raw.size(); ++k) r = r * id_cards[raw[k]] + val[raw[k]];
        return m.cpt(v, r, own);
      });
      work.push_back(std::move(lf));
    }
    std::vector<int> pending;
    for (int e : shared) pending.push_back(exo_id[e]);
    while (!pending.empty()) {
      // Eliminate the exogenous variable whose merged factor is smallest.
      std::size_t best = 0;
      double best_size = 0.0;
      for (std::size_t i = 0; i < pending.size(); ++i) {
        const double size = merged_size(work, pending[i], id_cards);
        if (i == 0 || size < best_size) best = i, best_size = size;
      }
      detail::check_cap(best_size, "exogenous enumeration");
      work = eliminate(std::move(work), pending[best], id_cards);
      pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
    }
    std::vector<int> all(f.scope.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
    f.table = tabulate(all, id_cards, [&](const std::vector<int>& val) {
      double p = 1.0;
      for (const auto& lf : work) {
        p *= lf.table[lf.index(val, id_cards)];
        if (p == 0.0) break;
      }
      return p;
    });
    factors.push_back(std::move(f));
  }

  std::vector<double> probs(JointTable::product(cards));
  std::vector<std::size_t> strides(cards.size(), 1);
  for (std::size_t i = cards.size(); i-- > 1;) strides[i - 1] = strides[i] * cards[i];
  for (std::size_t s = 0; s < probs.size(); ++s) {
    double p = 1.0;
    for (const auto& f : factors) {
      std::size_t idx = 0;
      for (std::size_t k = 0; k < f.scope.size(); ++k)
        idx = idx * f.scope_cards[k] + (s / strides[f.scope[k]]) % cards[f.scope[k]];
      p *= f.table[idx];
      if (p == 0.0) break;
    }
    probs[s] = p;
  }
  return JointTable(vars, cards, std::move(probs));
}

}  // namespace detail

/// Joint over all variables under do(x); intervened variables are point
/// masses at their assigned values.
inline JointTable intervened_joint(const DiscreteCbn& m, const Assignment& x) {
  detail::check_assignment(m, x);
  return detail::grouped_joint(m, c_components(m.graph()), x);
}

/// P(v) = Σ_u P(u) Π_i P(v_i | pa_i, u_i).
inline JointTable joint_distribution(const DiscreteCbn& m) { return intervened_joint(m, {}); }

/// P(v \ x | do(x)) by truncated factorization.
inline JointTable interventional_distribution(const DiscreteCbn& m, const Assignment& x) {
  const JointTable full = intervened_joint(m, x);
  std::vector<Name> rest;
  for (const auto& v : m.variables())
    if (!x.count(v)) rest.push_back(v);
  return full.marginal(rest);
}

/// Max deviation between P(v | do(x)) computed per variable-level c-component
/// and the cluster-level truncated factorization
/// Σ_u Π_{C_k ∉ X} P(c_k | pa(C_k), u'_k), over every value of the variables
/// in `x_clusters`.
inline double cluster_factorization_check(const DiscreteCbn& m, const Partition& p,
                                          const NodeSet& x_clusters) {
  p.check_covers(m.graph().nodes());
  const ClusterDag c = build_cdag(m.graph(), p);
  c.graph.require(x_clusters);
  std::vector<NodeSet> groups;
  for (const auto& comp : c_components(c.graph)) groups.push_back(p.expand(comp));

  const NodeSet xs = p.expand(x_clusters);
  const std::vector<Name> xv(xs.begin(), xs.end());
  double worst = 0.0;
  Assignment x;
  for (const auto& v : xv) x[v] = 0;
  for (;;) {
    const JointTable left = intervened_joint(m, x);
    const JointTable right = detail::grouped_joint(m, groups, x);
    worst = std::max(worst, left.max_abs_diff(right));
    std::size_t k = xv.size();
    while (k-- > 0) {
      if (++x[xv[k]] < m.card(xv[k])) break;
      x[xv[k]] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return worst;
}

/// `n` ancestral samples; each row lists values in m.variables() order.
inline std::vector<std::vector<int>> sample_dataset(const DiscreteCbn& m, std::size_t n,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  const auto& vars = m.variables();
  std::map<Name, std::size_t> pos;
  for (std::size_t i = 0; i < vars.size(); ++i) pos[vars[i]] = i;
  const auto& order = m.graph().topological_order();
  std::vector<std::vector<int>> rows;
  rows.reserve(n);
  std::vector<int> u(m.exogenous().size());
  std::vector<double> dist;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = 0; e < u.size(); ++e)
      if (m.exogenous()[e].children.size() == 2) u[e] = rng.categorical(m.exogenous()[e].probs);
    std::vector<int> r(vars.size());
    auto value = [&](const Name& v) { return r[pos.at(v)]; };
    for (const auto& v : order) {
      const std::size_t row = m.row(v, value, u);
      const int k = m.card(v);
      dist.assign(k, 0.0);
      for (int j = 0; j < k; ++j) dist[j] = m.cpt(v, row, j);
      r[pos.at(v)] = rng.categorical(dist);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cdag
