#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <locale>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cdag/cluster_dag.hpp"

namespace cdag {

/// Values for a set of named variables.
using Assignment = std::map<Name, int>;

/// Dense joint distribution over finitely many discrete variables. States are
/// laid out in mixed radix with the last variable varying fastest.
class JointTable {
 public:
  static constexpr double kSumTolerance = 1e-10;

  JointTable() = default;

  JointTable(std::vector<Name> variables, std::vector<int> cards, std::vector<double> probs,
             bool check_normalized = true)
      : variables_(std::move(variables)), cards_(std::move(cards)), probs_(std::move(probs)) {
    if (variables_.size() != cards_.size())
      throw InvalidQueryError("JointTable: variables and cardinalities differ in length");
    std::size_t total = 1;
    for (std::size_t i = 0; i < cards_.size(); ++i) {
      if (cards_[i] < 1) throw InvalidQueryError("JointTable: cardinality must be positive");
      if (!index_.emplace(variables_[i], i).second)
        throw InvalidQueryError("JointTable: duplicate variable '" + variables_[i] + "'");
      total *= static_cast<std::size_t>(cards_[i]);
    }
    if (probs_.size() != total)
      throw InvalidQueryError("JointTable: expected " + std::to_string(total) + " entries, got " +
                              std::to_string(probs_.size()));
    strides_.assign(cards_.size(), 1);
    for (std::size_t i = cards_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * cards_[i];
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0)) throw InvalidQueryError("JointTable: negative or NaN probability");
      sum += p;
    }
    if (check_normalized && std::abs(sum - 1.0) > kSumTolerance)
      throw InvalidQueryError("JointTable: probabilities sum to " + std::to_string(sum));
  }

  const std::vector<Name>& variables() const noexcept { return variables_; }
  const std::vector<int>& cards() const noexcept { return cards_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }

  bool has_variable(const Name& v) const { return index_.count(v) > 0; }
  std::size_t position(const Name& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw UnknownNodeError(v);
    return it->second;
  }
  int card(const Name& v) const { return cards_[position(v)]; }

  std::vector<int> decode(std::size_t state) const {
    std::vector<int> values(cards_.size());
    for (std::size_t i = 0; i < cards_.size(); ++i)
      values[i] = static_cast<int>((state / strides_[i]) % cards_[i]);
    return values;
  }

  std::size_t encode(const std::vector<int>& values) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < cards_.size(); ++i) s += strides_[i] * values[i];
    return s;
  }

  double at(const std::vector<int>& values) const { return probs_[encode(values)]; }

  /// Marginal over `vars`, in the order given.
  JointTable marginal(const std::vector<Name>& vars) const {
    std::vector<std::size_t> pos;
    std::vector<int> sub_cards;
    for (const auto& v : vars) {
      pos.push_back(position(v));
      sub_cards.push_back(cards_[pos.back()]);
    }
    std::vector<std::size_t> sub_strides(vars.size(), 1);
    for (std::size_t i = vars.size(); i-- > 1;)
      sub_strides[i - 1] = sub_strides[i] * sub_cards[i];
    std::size_t total = 1;
    for (int c : sub_cards) total *= static_cast<std::size_t>(c);
    std::vector<double> out(total, 0.0);
    for (std::size_t s = 0; s < probs_.size(); ++s) {
      std::size_t t = 0;
      for (std::size_t k = 0; k < pos.size(); ++k)
        t += sub_strides[k] * ((s / strides_[pos[k]]) % cards_[pos[k]]);
      out[t] += probs_[s];
    }
    return JointTable(vars, sub_cards, std::move(out), false);
  }

  /// P(assignment) for a partial assignment.
  double prob(const Assignment& a) const {
    std::vector<Name> vars;
    std::vector<int> vals;
    for (const auto& [v, x] : a) {
      vars.push_back(v);
      vals.push_back(x);
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vals[i] < 0 || vals[i] >= card(vars[i]))
        throw InvalidQueryError("value out of range for '" + vars[i] + "'");
    return marginal(vars).at(vals);
  }

  /// Table over clusters; a cluster's state encodes its members' values in
  /// mixed radix (members in name order, last fastest).
  JointTable group(const Partition& p) const {
    std::vector<Name> clusters;
    std::vector<int> cluster_cards;
    std::vector<std::vector<std::size_t>> member_pos;
    for (const auto& b : p.blocks()) {
      clusters.push_back(b.cluster);
      int c = 1;
      std::vector<std::size_t> mp;
      for (const auto& v : b.members) {
        mp.push_back(position(v));
        c *= cards_[mp.back()];
      }
      cluster_cards.push_back(c);
      member_pos.push_back(std::move(mp));
    }
    if (p.variables().size() != variables_.size())
      throw PartitionError("partition does not cover the table's variables");
    JointTable shell(clusters, cluster_cards,
                     std::vector<double>(product(cluster_cards), 0.0), false);
    std::vector<int> cvals(clusters.size());
    for (std::size_t s = 0; s < probs_.size(); ++s) {
      const auto vals = decode(s);
      for (std::size_t k = 0; k < clusters.size(); ++k) {
        int code = 0;
        for (auto pos : member_pos[k]) code = code * cards_[pos] + vals[pos];
        cvals[k] = code;
      }
      shell.probs_[shell.encode(cvals)] += probs_[s];
    }
    return shell;
  }

  /// Max absolute difference against a table with the same layout.
  double max_abs_diff(const JointTable& other) const {
    if (variables_ != other.variables_ || cards_ != other.cards_)
      throw InvalidQueryError("max_abs_diff: table layouts differ");
    double m = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i)
      m = std::max(m, std::abs(probs_[i] - other.probs_[i]));
    return m;
  }

  double min_entry() const {
    double m = 1.0;
    for (double p : probs_) m = std::min(m, p);
    return m;
  }

  /// CSV: header of variable names plus "p"; one row per joint state.
  void write_csv(std::ostream& os) const {
    for (const auto& v : variables_) os << v << ',';
    os << "p\n";
    std::ostringstream num;
    num.imbue(std::locale::classic());
    num.precision(17);
    for (std::size_t s = 0; s < probs_.size(); ++s) {
      for (int x : decode(s)) os << x << ',';
      num.str("");
      num << probs_[s];
      os << num.str() << '\n';
    }
  }

  /// Reads the CSV format above. Cardinalities are max observed value + 1;
  /// states not listed get probability 0.
  static JointTable read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty table", 1, 1);
    auto split = [](const std::string& s) {
      std::vector<std::string> out;
      std::string cell;
      std::istringstream ss(s);
      while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
      }
      return out;
    };
    auto header = split(line);
    if (header.size() < 2 || header.back() != "p")
      throw ParseError("table header must end with column 'p'", 1, 1);
    header.pop_back();
    std::vector<std::pair<std::vector<int>, double>> rows;
    std::vector<int> max_val(header.size(), 0);
    int line_no = 1;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      auto cells = split(line);
      if (cells.size() != header.size() + 1)
        throw ParseError("expected " + std::to_string(header.size() + 1) + " columns", line_no, 1);
      std::vector<int> vals;
      for (std::size_t i = 0; i < header.size(); ++i) {
        std::size_t used = 0;
        int v = 0;
        try {
          v = std::stoi(cells[i], &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != cells[i].size() || v < 0)
          throw ParseError("bad value '" + cells[i] + "'", line_no, static_cast<int>(i) + 1);
        max_val[i] = std::max(max_val[i], v);
        vals.push_back(v);
      }
      std::istringstream num(cells.back());
      num.imbue(std::locale::classic());
      double p = 0.0;
      if (!(num >> p)) throw ParseError("bad probability '" + cells.back() + "'", line_no, 1);
      rows.emplace_back(std::move(vals), p);
    }
    std::vector<int> cards;
    for (int m : max_val) cards.push_back(m + 1);
    JointTable shell(header, cards, std::vector<double>(product(cards), 0.0), false);
    for (auto& [vals, p] : rows) shell.probs_[shell.encode(vals)] += p;
    return JointTable(shell.variables_, shell.cards_, shell.probs_);
  }

  /// Empirical distribution of `rows` (values ordered as `vars`), with
  /// `pseudo_count` added to every cell before normalizing.
  static JointTable from_samples(const std::vector<Name>& vars, const std::vector<int>& cards,
                                 const std::vector<std::vector<int>>& rows,
                                 double pseudo_count = 0.0) {
    JointTable shell(vars, cards, std::vector<double>(product(cards), pseudo_count), false);
    for (const auto& r : rows) shell.probs_[shell.encode(r)] += 1.0;
    double total = 0.0;
    for (double p : shell.probs_) total += p;
    if (total <= 0.0) throw InvalidQueryError("from_samples: no mass");
    for (double& p : shell.probs_) p /= total;
    return JointTable(vars, cards, std::move(shell.probs_));
  }

  static std::size_t product(const std::vector<int>& cards) {
    std::size_t t = 1;
    for (int c : cards) t *= static_cast<std::size_t>(c);
    return t;
  }

 private:
  std::vector<Name> variables_;
  std::vector<int> cards_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
  std::map<Name, std::size_t> index_;
};

}  // namespace cdag
