#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cdag/cdag.hpp"

namespace testing_support {

using namespace cdag;

/// Graph from a compact edge list: "A->B, B<->C, D" (a bare name declares an
/// isolated node).
inline Admg graph(const std::string& spec) {
  NodeSet nodes;
  EdgeSet directed, bidirected;
  std::stringstream ss(spec);
  std::string item;
  auto trim = [](std::string s) {
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
  };
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (auto p = item.find("<->"); p != std::string::npos) {
      auto a = trim(item.substr(0, p)), b = trim(item.substr(p + 3));
      nodes.insert(a);
      nodes.insert(b);
      bidirected.insert(canonical_bidirected(a, b));
    } else if (auto q = item.find("->"); q != std::string::npos) {
      auto a = trim(item.substr(0, q)), b = trim(item.substr(q + 2));
      nodes.insert(a);
      nodes.insert(b);
      directed.insert({a, b});
    } else {
      nodes.insert(item);
    }
  }
  return Admg(nodes, directed, bidirected);
}

inline ClusterDag direct(const Admg& g) { return ClusterDag{g, std::nullopt}; }

inline GraphFile load_fig(const std::string& name) {
  std::ifstream in(std::string(CDAG_FIGS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_graph(ss.str());
}

/// Exhaustive m-separation: enumerate every simple path between X and Y and
/// test each for being open given Z.
inline bool brute_m_separated(const Admg& g, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
  struct Step {
    Name to;
    bool head_at_from;  // arrowhead at the node we leave
    bool head_at_to;    // arrowhead at the node we reach
  };
  std::map<Name, std::vector<Step>> adj;
  for (const auto& [a, b] : g.directed_edges()) {
    adj[a].push_back({b, false, true});
    adj[b].push_back({a, true, false});
  }
  for (const auto& [a, b] : g.bidirected_edges()) {
    adj[a].push_back({b, true, true});
    adj[b].push_back({a, true, true});
  }
  NodeSet anz = z;
  for (const auto& v : ancestors(g, z)) anz.insert(v);

  bool open_found = false;
  NodeSet on_path;
  std::function<void(const Name&, bool)> dfs = [&](const Name& v, bool arrived_with_head) {
    if (open_found) return;
    for (const auto& s : adj[v]) {
      if (on_path.count(s.to)) continue;
      if (on_path.size() > 1 || !x.count(v)) {
        // v is an interior node of the path
        const bool collider = arrived_with_head && s.head_at_from;
        if (collider ? !anz.count(v) : z.count(v) > 0) continue;
      }
      if (y.count(s.to)) {
        open_found = true;
        return;
      }
      if (x.count(s.to)) continue;
      on_path.insert(s.to);
      dfs(s.to, s.head_at_to);
      on_path.erase(s.to);
    }
  };
  for (const auto& s : x) {
    on_path = {s};
    dfs(s, false);
    if (open_found) return false;
  }
  return true;
}

/// Random ADMG over n nodes named by `prefix` + index; directed edges follow a
/// random order.
inline Admg random_admg(Rng& rng, int n, double p_dir, double p_bi, const std::string& prefix = "V") {
  std::vector<Name> names;
  for (int i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  std::vector<Name> order = names;
  rng.shuffle(order);
  EdgeSet directed, bidirected;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p_dir)) directed.insert({order[i], order[j]});
      if (rng.bernoulli(p_bi)) bidirected.insert(canonical_bidirected(order[i], order[j]));
    }
  return Admg(NodeSet(names.begin(), names.end()), directed, bidirected);
}

/// Random subset of `from` (each element kept with probability p).
inline NodeSet random_subset(Rng& rng, const NodeSet& from, double p) {
  NodeSet out;
  for (const auto& v : from)
    if (rng.bernoulli(p)) out.insert(v);
  return out;
}

inline Name pick(Rng& rng, const NodeSet& from) {
  auto it = from.begin();
  std::advance(it, static_cast<long>(rng.below(from.size())));
  return *it;
}

/// P(v \ x | do(x)) by brute force: enumerate the full exogenous space jointly
/// and multiply all endogenous factors (no c-component factorization).
inline JointTable brute_interventional(const DiscreteCbn& m, const Assignment& x) {
  const auto& vars = m.variables();
  const auto cards = m.card_vector();
  std::vector<int> shared;
  for (std::size_t e = 0; e < m.exogenous().size(); ++e)
    if (m.exogenous()[e].children.size() == 2) shared.push_back(static_cast<int>(e));
  std::vector<double> probs(JointTable::product(cards), 0.0);
  JointTable layout(vars, cards, std::vector<double>(probs.size(), 0.0), false);
  std::vector<int> u(m.exogenous().size(), 0);
  for (std::size_t s = 0; s < probs.size(); ++s) {
    const auto vals = layout.decode(s);
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = vals[i];
    bool consistent = true;
    for (const auto& [v, val] : x) consistent = consistent && a.at(v) == val;
    if (!consistent) continue;
    auto lookup = [&](const Name& v) { return a.at(v); };
    const std::size_t combos = [&] {
      std::size_t c = 1;
      for (int e : shared) c *= m.exogenous()[e].probs.size();
      return c;
    }();
    double total = 0.0;
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t rest = c;
      double w = 1.0;
      for (int e : shared) {
        const auto k = m.exogenous()[e].probs.size();
        u[e] = static_cast<int>(rest % k);
        rest /= k;
        w *= m.exogenous()[e].probs[u[e]];
      }
      for (const auto& v : vars)
        if (!x.count(v)) w *= m.cpt(v, m.row(v, lookup, u), a.at(v));
      total += w;
    }
    probs[s] = total;
  }
  std::vector<Name> rest;
  for (const auto& v : vars)
    if (!x.count(v)) rest.push_back(v);
  return JointTable(vars, cards, probs).marginal(rest);
}

/// Max |expr − P(y | do(x))| over every assignment of x ∪ y, with the oracle
/// computed on `m` at cluster level through `p` (pass singletons for the
/// variable level).
inline double id_error(const ProbExpr& expr, const DiscreteCbn& m, const Partition& p,
                       const NodeSet& x_clusters, const NodeSet& y_clusters) {
  const JointTable observed = joint_distribution(m).group(p);
  Evaluator ev(observed);
  std::vector<Name> xs(x_clusters.begin(), x_clusters.end());
  double worst = 0.0;
  for_each_assignment(xs, observed, [&](const Assignment& xc) {
    Assignment xv;
    for (const auto& [c, state] : xc) {
      int s = state;
      const auto& members = p.members(c);
      for (auto it = members.rbegin(); it != members.rend(); ++it) {
        xv[*it] = s % m.card(*it);
        s /= m.card(*it);
      }
    }
    const JointTable truth = intervened_joint(m, xv).group(p);
    std::vector<Name> ys(y_clusters.begin(), y_clusters.end());
    const JointTable ty = truth.marginal(ys);
    for_each_assignment(ys, observed, [&](const Assignment& yc) {
      Assignment a = xc;
      a.insert(yc.begin(), yc.end());
      std::vector<int> yvals;
      for (const auto& v : ys) yvals.push_back(yc.at(v));
      worst = std::max(worst, std::abs(ev(expr, a) - ty.at(yvals)));
    });
  });
  return worst;
}

/// Random full-support joint table over `vars` with the given cardinalities.
inline JointTable random_table(Rng& rng, const std::vector<Name>& vars, const std::vector<int>& cards) {
  std::size_t n = JointTable::product(cards);
  auto p = rng.dirichlet1(static_cast<int>(n));
  return JointTable(vars, cards, p);
}

}  // namespace testing_support
