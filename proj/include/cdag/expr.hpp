#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cdag/admg.hpp"

namespace cdag {

enum class ExprKind { One, Prob, Product, Sum, Fraction };

/// Immutable symbolic probability expression.
///
/// Variable names inside an expression may carry trailing primes (`X'`,
/// `X''`); a primed name is a distinct variable ranging over the domain of its
/// unprimed base. Sums bind their `bound()` names in `body()`.
class ProbExpr {
 public:
  struct Node {
    ExprKind kind;
    std::vector<Name> targets;  // Prob
    std::vector<Name> given;    // Prob
    std::vector<Name> bound;    // Sum
    std::vector<ProbExpr> children;
  };

  ProbExpr() : node_(one_node()) {}

  static ProbExpr one() { return ProbExpr(); }

  /// P(targets | given). Throws if the two lists overlap.
  static ProbExpr prob(std::vector<Name> targets, std::vector<Name> given = {}) {
    for (const auto& t : targets)
      if (std::find(given.begin(), given.end(), t) != given.end())
        throw InvalidQueryError("P(.|.) with '" + t + "' on both sides");
    if (targets.empty()) return one();
    return ProbExpr(Node{ExprKind::Prob, std::move(targets), std::move(given), {}, {}});
  }

  static ProbExpr product(std::vector<ProbExpr> factors) {
    return ProbExpr(Node{ExprKind::Product, {}, {}, {}, std::move(factors)});
  }

  static ProbExpr sum(std::vector<Name> bound, ProbExpr body) {
    return ProbExpr(Node{ExprKind::Sum, {}, {}, std::move(bound), {std::move(body)}});
  }

  static ProbExpr fraction(ProbExpr numerator, ProbExpr denominator) {
    return ProbExpr(
        Node{ExprKind::Fraction, {}, {}, {}, {std::move(numerator), std::move(denominator)}});
  }

  ExprKind kind() const noexcept { return node_->kind; }
  const std::vector<Name>& targets() const noexcept { return node_->targets; }
  const std::vector<Name>& given() const noexcept { return node_->given; }
  const std::vector<Name>& bound() const noexcept { return node_->bound; }
  const std::vector<ProbExpr>& children() const noexcept { return node_->children; }
  const ProbExpr& body() const { return node_->children.at(0); }
  const ProbExpr& numerator() const { return node_->children.at(0); }
  const ProbExpr& denominator() const { return node_->children.at(1); }

  /// Identity of the shared node; stable for the lifetime of the expression.
  const Node* id() const noexcept { return node_.get(); }

  bool is_one() const noexcept { return kind() == ExprKind::One; }

  NodeSet free_variables() const {
    switch (kind()) {
      case ExprKind::One: return {};
      case ExprKind::Prob: {
        NodeSet s(targets().begin(), targets().end());
        s.insert(given().begin(), given().end());
        return s;
      }
      case ExprKind::Sum:
        return set_difference(body().free_variables(), NodeSet(bound().begin(), bound().end()));
      default: {
        NodeSet s;
        for (const auto& c : children()) {
          auto f = c.free_variables();
          s.insert(f.begin(), f.end());
        }
        return s;
      }
    }
  }

  friend bool operator==(const ProbExpr& a, const ProbExpr& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    return x.kind == y.kind && x.targets == y.targets && x.given == y.given &&
           x.bound == y.bound && x.children == y.children;
  }

 private:
  explicit ProbExpr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  static const std::shared_ptr<const Node>& one_node() {
    static const auto n = std::make_shared<const Node>(Node{ExprKind::One, {}, {}, {}, {}});
    return n;
  }

  std::shared_ptr<const Node> node_;
};

/// Strips trailing primes.
inline Name base_name(const Name& v) {
  auto end = v.find_last_not_of('\'');
  return end == Name::npos ? v : v.substr(0, end + 1);
}

/// Replaces free occurrences of `from` with `to`.
inline ProbExpr rename_free(const ProbExpr& e, const Name& from, const Name& to) {
  auto swap_name = [&](std::vector<Name> names) {
    for (auto& n : names)
      if (n == from) n = to;
    return names;
  };
  switch (e.kind()) {
    case ExprKind::One: return e;
    case ExprKind::Prob: return ProbExpr::prob(swap_name(e.targets()), swap_name(e.given()));
    case ExprKind::Sum:
      if (std::find(e.bound().begin(), e.bound().end(), from) != e.bound().end()) return e;
      return ProbExpr::sum(e.bound(), rename_free(e.body(), from, to));
    case ExprKind::Product: {
      std::vector<ProbExpr> f;
      for (const auto& c : e.children()) f.push_back(rename_free(c, from, to));
      return ProbExpr::product(std::move(f));
    }
    case ExprKind::Fraction:
      return ProbExpr::fraction(rename_free(e.numerator(), from, to),
                                rename_free(e.denominator(), from, to));
  }
  return e;
}

namespace detail {
inline ProbExpr freshen(const ProbExpr& e, NodeSet& scope) {
  switch (e.kind()) {
    case ExprKind::One:
    case ExprKind::Prob: return e;
    case ExprKind::Product: {
      std::vector<ProbExpr> f;
      for (const auto& c : e.children()) f.push_back(freshen(c, scope));
      return ProbExpr::product(std::move(f));
    }
    case ExprKind::Fraction: {
      auto n = freshen(e.numerator(), scope);
      auto d = freshen(e.denominator(), scope);
      return ProbExpr::fraction(std::move(n), std::move(d));
    }
    case ExprKind::Sum: {
      ProbExpr body = e.body();
      std::vector<Name> bound;
      NodeSet added;
      for (const auto& v : e.bound()) {
        Name fresh = v;
        if (scope.count(v)) {
          const auto body_free = body.free_variables();
          do fresh += '\'';
          while (scope.count(fresh) || body_free.count(fresh));
          body = rename_free(body, v, fresh);
        }
        bound.push_back(fresh);
        if (scope.insert(fresh).second) added.insert(fresh);
      }
      auto out = ProbExpr::sum(std::move(bound), freshen(body, scope));
      for (const auto& v : added) scope.erase(v);
      return out;
    }
  }
  return e;
}
}  // namespace detail

/// Renames bound variables so that no sum rebinds a free name or a name bound
/// by an enclosing sum. Renamed variables get primes appended.
inline ProbExpr freshen_bound(const ProbExpr& e) {
  NodeSet scope = e.free_variables();
  return detail::freshen(e, scope);
}

// ---------------------------------------------------------------------------
// Simplification

namespace detail {

inline bool mentions(const ProbExpr& e, const Name& v) { return e.free_variables().count(v) > 0; }

inline std::vector<ProbExpr> factors_of(const ProbExpr& e) {
  if (e.kind() == ExprKind::Product) return e.children();
  if (e.is_one()) return {};
  return {e};
}

inline ProbExpr make_product(std::vector<ProbExpr> factors) {
  if (factors.empty()) return ProbExpr::one();
  if (factors.size() == 1) return factors.front();
  return ProbExpr::product(std::move(factors));
}

inline ProbExpr simplify_once(const ProbExpr& e);

inline ProbExpr simplify_product(const ProbExpr& e) {
  std::vector<ProbExpr> flat;
  for (const auto& c : e.children()) {
    auto s = simplify_once(c);
    for (auto& f : factors_of(s)) flat.push_back(std::move(f));
  }
  return make_product(std::move(flat));
}

inline ProbExpr simplify_sum(const ProbExpr& e) {
  ProbExpr body = simplify_once(e.body());
  std::vector<Name> bound = e.bound();
  // Merge directly nested sums unless the inner one rebinds a name.
  auto rebinds = [&](const ProbExpr& inner) {
    for (const auto& v : inner.bound())
      if (std::find(bound.begin(), bound.end(), v) != bound.end()) return true;
    return false;
  };
  while (body.kind() == ExprKind::Sum && !rebinds(body)) {
    bound.insert(bound.end(), body.bound().begin(), body.bound().end());
    body = body.body();
  }
  // Normalization: Σ_v P(v,A|B) · rest → P(A|B) · rest when v occurs nowhere else.
  bool changed = true;
  while (changed && !bound.empty()) {
    changed = false;
    auto factors = factors_of(body);
    for (auto it = bound.begin(); it != bound.end() && !changed; ++it) {
      const Name v = *it;
      int holder = -1;
      int count = 0;
      for (std::size_t i = 0; i < factors.size(); ++i)
        if (mentions(factors[i], v)) {
          ++count;
          holder = static_cast<int>(i);
        }
      if (count != 1) continue;
      const auto& f = factors[holder];
      if (f.kind() != ExprKind::Prob) continue;
      auto t = f.targets();
      auto pos = std::find(t.begin(), t.end(), v);
      if (pos == t.end()) continue;
      t.erase(pos);
      factors[holder] = ProbExpr::prob(std::move(t), f.given());
      std::vector<ProbExpr> kept;
      for (auto& x : factors)
        if (!x.is_one()) kept.push_back(std::move(x));
      body = make_product(std::move(kept));
      bound.erase(it);
      changed = true;
    }
  }
  if (bound.empty()) return body;
  // Hoist factors that mention no bound variable.
  auto factors = factors_of(body);
  std::vector<ProbExpr> outside, inside;
  for (auto& f : factors) {
    bool uses = false;
    for (const auto& v : bound) uses = uses || mentions(f, v);
    (uses ? inside : outside).push_back(std::move(f));
  }
  if (inside.empty()) return e.bound() == bound && e.body() == body ? e : ProbExpr::sum(bound, body);
  // Push each bound variable as far inward as its factors allow.
  for (std::size_t k = bound.size(); k-- > 0;) {
    if (bound.size() < 2) break;
    const Name v = bound[k];
    std::vector<ProbExpr> with, without;
    for (auto& f : inside) (mentions(f, v) ? with : without).push_back(f);
    if (without.empty() || with.empty()) continue;
    without.push_back(ProbExpr::sum({v}, make_product(std::move(with))));
    inside = std::move(without);
    bound.erase(bound.begin() + static_cast<std::ptrdiff_t>(k));
  }
  auto inner = ProbExpr::sum(bound, make_product(std::move(inside)));
  if (outside.empty()) return inner;
  outside.push_back(std::move(inner));
  return make_product(std::move(outside));
}

inline ProbExpr simplify_fraction(const ProbExpr& e) {
  auto num = factors_of(simplify_once(e.numerator()));
  auto den = factors_of(simplify_once(e.denominator()));
  for (auto it = den.begin(); it != den.end();) {
    auto match = std::find(num.begin(), num.end(), *it);
    if (match != num.end()) {
      num.erase(match);
      it = den.erase(it);
    } else {
      ++it;
    }
  }
  // P(A,B|C) / P(B|C) → P(A|B,C)
  if (num.size() == 1 && den.size() == 1 && num[0].kind() == ExprKind::Prob &&
      den[0].kind() == ExprKind::Prob) {
    const auto& a = num[0];
    const auto& b = den[0];
    NodeSet ag(a.given().begin(), a.given().end()), bg(b.given().begin(), b.given().end());
    NodeSet at(a.targets().begin(), a.targets().end()), bt(b.targets().begin(), b.targets().end());
    if (ag == bg && is_subset(bt, at) && bt != at) {
      std::vector<Name> targets, given = b.targets();
      for (const auto& v : a.targets())
        if (!bt.count(v)) targets.push_back(v);
      given.insert(given.end(), a.given().begin(), a.given().end());
      return ProbExpr::prob(std::move(targets), std::move(given));
    }
  }
  if (den.empty()) return make_product(std::move(num));
  return ProbExpr::fraction(make_product(std::move(num)), make_product(std::move(den)));
}

inline ProbExpr simplify_once(const ProbExpr& e) {
  switch (e.kind()) {
    case ExprKind::One:
    case ExprKind::Prob: return e;
    case ExprKind::Product: return simplify_product(e);
    case ExprKind::Sum: return simplify_sum(e);
    case ExprKind::Fraction: return simplify_fraction(e);
  }
  return e;
}

}  // namespace detail

/// Applies the rewrite rules to a fixed point: flatten products and drop 1s,
/// merge nested sums, sum out normalized factors, hoist factors out of sums,
/// cancel common factors in fractions, and turn P(A,B|C)/P(B|C) into P(A|B,C).
/// Every rule is semantics-preserving on full-support tables.
inline ProbExpr simplify(const ProbExpr& e) {
  ProbExpr cur = e;
  for (int guard = 0; guard < 64; ++guard) {
    ProbExpr next = detail::simplify_once(cur);
    if (next == cur) return next;
    cur = std::move(next);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Rendering

enum class RenderFormat { Text, Latex, Json };

namespace detail {

inline std::string lower(const Name& v) {
  std::string s;
  for (char ch : v) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

inline std::string join_lower(const std::vector<Name>& names, const char* sep) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += sep;
    out += lower(n);
  }
  return out;
}

inline std::string render_text(const ProbExpr& e, bool tail_position);

inline std::string render_text_factor(const ProbExpr& f, bool last) {
  std::string s = render_text(f, last);
  if (f.kind() == ExprKind::Sum && !last) return "[" + s + "]";
  return s;
}

inline std::string render_text(const ProbExpr& e, bool tail_position) {
  switch (e.kind()) {
    case ExprKind::One: return "1";
    case ExprKind::Prob: {
      std::string s = "P(" + join_lower(e.targets(), ",");
      if (!e.given().empty()) s += "|" + join_lower(e.given(), ",");
      return s + ")";
    }
    case ExprKind::Product: {
      std::string s;
      const auto& f = e.children();
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) s += " ";
        s += render_text_factor(f[i], i + 1 == f.size());
      }
      return s;
    }
    case ExprKind::Sum: {
      std::string b = join_lower(e.bound(), ",");
      std::string s = b.size() == 1 ? "Σ_" + b : "Σ_{" + b + "}";
      (void)tail_position;
      return s + " " + render_text(e.body(), true);
    }
    case ExprKind::Fraction: {
      auto wrap = [](const ProbExpr& x) {
        std::string s = render_text(x, true);
        return x.kind() == ExprKind::Prob || x.is_one() ? s : "(" + s + ")";
      };
      return wrap(e.numerator()) + " / " + wrap(e.denominator());
    }
  }
  return {};
}

inline std::string latex_name(const Name& v) {
  std::string base = lower(base_name(v));
  std::size_t primes = v.size() - base_name(v).size();
  return base + std::string(primes, '\'');
}

inline std::string latex_list(const std::vector<Name>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += latex_name(n);
  }
  return out;
}

inline std::string render_latex(const ProbExpr& e) {
  switch (e.kind()) {
    case ExprKind::One: return "1";
    case ExprKind::Prob: {
      std::string s = "P(" + latex_list(e.targets());
      if (!e.given().empty()) s += " \\mid " + latex_list(e.given());
      return s + ")";
    }
    case ExprKind::Product: {
      std::string s;
      const auto& f = e.children();
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) s += " ";
        std::string part = render_latex(f[i]);
        if (f[i].kind() == ExprKind::Sum && i + 1 != f.size()) part = "\\left[" + part + "\\right]";
        s += part;
      }
      return s;
    }
    case ExprKind::Sum:
      return "\\sum_{" + latex_list(e.bound()) + "} " + render_latex(e.body());
    case ExprKind::Fraction:
      return "\\frac{" + render_latex(e.numerator()) + "}{" + render_latex(e.denominator()) + "}";
  }
  return {};
}

inline const char* kind_name(ExprKind k) {
  switch (k) {
    case ExprKind::One: return "one";
    case ExprKind::Prob: return "prob";
    case ExprKind::Product: return "product";
    case ExprKind::Sum: return "sum";
    case ExprKind::Fraction: return "fraction";
  }
  return "?";
}

}  // namespace detail

/// JSON schema: {"kind": one|prob|product|sum|fraction, "vars": [...],
/// "given": [...], "children": [...]}. `vars` holds the targets of a prob and
/// the bound names of a sum; `given` appears on prob nodes only.
inline nlohmann::ordered_json to_json(const ProbExpr& e) {
  nlohmann::ordered_json j;
  j["kind"] = detail::kind_name(e.kind());
  switch (e.kind()) {
    case ExprKind::Prob:
      j["vars"] = e.targets();
      j["given"] = e.given();
      break;
    case ExprKind::Sum: j["vars"] = e.bound(); break;
    default: j["vars"] = nlohmann::ordered_json::array();
  }
  j["children"] = nlohmann::ordered_json::array();
  for (const auto& c : e.children()) j["children"].push_back(to_json(c));
  return j;
}

inline ProbExpr from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    auto names = [&](const char* key) {
      return j.contains(key) ? j.at(key).get<std::vector<Name>>() : std::vector<Name>{};
    };
    std::vector<ProbExpr> kids;
    if (j.contains("children"))
      for (const auto& c : j.at("children")) kids.push_back(from_json(c));
    if (kind == "one") return ProbExpr::one();
    if (kind == "prob") return ProbExpr::prob(names("vars"), names("given"));
    if (kind == "product") return ProbExpr::product(std::move(kids));
    if (kind == "sum") {
      if (kids.size() != 1) throw ParseError("sum needs exactly one child", 1, 1);
      return ProbExpr::sum(names("vars"), std::move(kids[0]));
    }
    if (kind == "fraction") {
      if (kids.size() != 2) throw ParseError("fraction needs exactly two children", 1, 1);
      return ProbExpr::fraction(std::move(kids[0]), std::move(kids[1]));
    }
    throw ParseError("unknown expression kind '" + kind + "'", 1, 1);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed expression json: ") + ex.what(), 1, 1);
  }
}

inline std::string render(const ProbExpr& e, RenderFormat format = RenderFormat::Text) {
  switch (format) {
    case RenderFormat::Text: return detail::render_text(e, true);
    case RenderFormat::Latex: return detail::render_latex(e);
    case RenderFormat::Json: return to_json(e).dump();
  }
  return {};
}

}  // namespace cdag
