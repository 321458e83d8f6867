#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cdag/expr.hpp"
#include "cdag/joint_table.hpp"

namespace cdag {

/// Evaluates expressions against one joint table. Marginals and subexpression
/// values (keyed by the values of their free variables) are memoized, so a
/// single Evaluator should be reused across the assignments of a sweep.
class Evaluator {
 public:
  explicit Evaluator(const JointTable& table) : table_(table) {}

  double operator()(const ProbExpr& e, const Assignment& free_values) {
    if (kept_.insert(e.id()).second) roots_.push_back(e);  // keeps memo keys alive
    Assignment a = free_values;
    return eval(e, a);
  }

  const JointTable& table() const noexcept { return table_; }

 private:
  struct NodeInfo {
    std::vector<Name> free;
    std::unordered_map<std::uint64_t, double> memo;
  };

  int card_of(const Name& v) const {
    const Name b = base_name(v);
    if (!table_.has_variable(b)) throw UnknownNodeError(b);
    return table_.card(b);
  }

  static int value_of(const Assignment& a, const Name& v) {
    auto it = a.find(v);
    if (it == a.end()) throw InvalidQueryError("no value for variable '" + v + "'");
    return it->second;
  }

  double marginal(const std::vector<std::pair<std::size_t, int>>& pos_vals) {
    std::vector<std::size_t> key;
    for (const auto& [p, v] : pos_vals) key.push_back(p);
    auto it = marginals_.find(key);
    if (it == marginals_.end()) {
      std::vector<Name> vars;
      for (auto p : key) vars.push_back(table_.variables()[p]);
      it = marginals_.emplace(key, table_.marginal(vars)).first;
    }
    std::vector<int> vals;
    for (const auto& [p, v] : pos_vals) vals.push_back(v);
    return it->second.at(vals);
  }

  double eval_prob(const ProbExpr& e, const Assignment& a) {
    std::map<std::size_t, int> joint, cond;
    auto add = [&](const Name& v, std::map<std::size_t, int>& dst) {
      const Name b = base_name(v);
      if (!table_.has_variable(b)) throw UnknownNodeError(b);
      const auto p = table_.position(b);
      const int x = value_of(a, v);
      if (x < 0 || x >= table_.cards()[p])
        throw InvalidQueryError("value out of range for '" + v + "'");
      if (!joint.emplace(p, x).second)
        throw InvalidQueryError("variable '" + b + "' appears twice in one term");
      if (&dst != &joint) dst.emplace(p, x);
    };
    for (const auto& v : e.given()) add(v, cond);
    for (const auto& v : e.targets()) add(v, joint);
    const double num = marginal({joint.begin(), joint.end()});
    if (cond.empty()) return num;
    const double den = marginal({cond.begin(), cond.end()});
    if (den <= 0.0) throw ZeroConditioningMass("conditioning event has probability zero");
    return num / den;
  }

  double eval(const ProbExpr& e, Assignment& a) {
    if (e.kind() == ExprKind::One) return 1.0;
    if (e.kind() == ExprKind::Prob) return eval_prob(e, a);

    auto [it, fresh] = info_.try_emplace(e.id());
    NodeInfo& info = it->second;
    if (fresh) {
      auto f = e.free_variables();
      info.free.assign(f.begin(), f.end());
    }
    std::uint64_t key = 0;
    for (const auto& v : info.free)
      key = key * static_cast<std::uint64_t>(card_of(v)) + static_cast<std::uint64_t>(value_of(a, v));
    if (auto m = info.memo.find(key); m != info.memo.end()) return m->second;

    double result = 0.0;
    switch (e.kind()) {
      case ExprKind::Product: {
        result = 1.0;
        for (const auto& c : e.children()) {
          result *= eval(c, a);
          if (result == 0.0) break;
        }
        break;
      }
      case ExprKind::Fraction: {
        const double num = eval(e.numerator(), a);
        const double den = eval(e.denominator(), a);
        if (den <= 0.0) throw ZeroConditioningMass("fraction denominator is zero");
        result = num / den;
        break;
      }
      case ExprKind::Sum: {
        const auto& bound = e.bound();
        std::vector<int> cards;
        std::vector<std::pair<bool, int>> saved;
        for (const auto& v : bound) {
          cards.push_back(card_of(v));
          auto prev = a.find(v);
          saved.emplace_back(prev != a.end(), prev != a.end() ? prev->second : 0);
          a[v] = 0;
        }
        for (;;) {
          result += eval(e.body(), a);
          std::size_t k = 0;
          for (; k < bound.size(); ++k) {
            if (++a[bound[k]] < cards[k]) break;
            a[bound[k]] = 0;
          }
          if (k == bound.size()) break;
        }
        for (std::size_t k = 0; k < bound.size(); ++k) {
          if (saved[k].first)
            a[bound[k]] = saved[k].second;
          else
            a.erase(bound[k]);
        }
        break;
      }
      default: break;
    }
    // `info` may have been invalidated by rehashing during recursion.
    info_[e.id()].memo.emplace(key, result);
    return result;
  }

  const JointTable& table_;
  std::vector<ProbExpr> roots_;
  std::unordered_set<const ProbExpr::Node*> kept_;
  std::map<std::vector<std::size_t>, JointTable> marginals_;
  std::unordered_map<const ProbExpr::Node*, NodeInfo> info_;
};

/// One-shot evaluation of `e` at the given values of its free variables.
inline double evaluate(const ProbExpr& e, const JointTable& t, const Assignment& a) {
  Evaluator ev(t);
  return ev(e, a);
}

/// Calls `fn(assignment)` for every joint value of `vars` (cardinalities of
/// their base names in `t`).
template <typename Fn>
void for_each_assignment(const std::vector<Name>& vars, const JointTable& t, Fn&& fn) {
  std::vector<int> cards;
  for (const auto& v : vars) cards.push_back(t.card(base_name(v)));
  Assignment a;
  for (const auto& v : vars) a[v] = 0;
  for (;;) {
    fn(static_cast<const Assignment&>(a));
    std::size_t k = vars.size();
    while (k-- > 0) {
      if (++a[vars[k]] < cards[k]) break;
      a[vars[k]] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) return;
  }
}

/// True iff both expressions agree within `tol` at every assignment of their
/// free variables.
inline bool equivalent_on(const ProbExpr& e1, const ProbExpr& e2, const JointTable& t,
                          double tol = 1e-9) {
  const NodeSet f = set_union(e1.free_variables(), e2.free_variables());
  const std::vector<Name> vars(f.begin(), f.end());
  Evaluator ev(t);
  bool same = true;
  for_each_assignment(vars, t, [&](const Assignment& a) {
    if (same && std::abs(ev(e1, a) - ev(e2, a)) > tol) same = false;
  });
  return same;
}

}  // namespace cdag
