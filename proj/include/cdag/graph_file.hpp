#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cdag/cluster_dag.hpp"

namespace cdag {

/// Contents of a graph file. `admg` is the variable-level diagram when the
/// file declares one; `cdag` is always present: the quotient under the file's
/// partition, the diagram itself read as singleton clusters, or a C-DAG given
/// directly through bare `cluster NAME` declarations.
struct GraphFile {
  std::optional<Admg> admg;
  std::optional<Partition> partition;
  ClusterDag cdag;

  friend bool operator==(const GraphFile& a, const GraphFile& b) {
    return a.admg == b.admg && a.partition == b.partition && a.cdag.graph == b.cdag.graph &&
           a.cdag.partition == b.cdag.partition;
  }
};

namespace detail {

struct Token {
  enum Kind { Word, Arrow, BiArrow, Equals, LBrace, RBrace, Comma, End } kind;
  std::string text;
  int column;
  bool quoted = false;
};

inline bool is_name_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '\'' ||
         static_cast<unsigned char>(ch) >= 0x80;
}

inline std::vector<Token> tokenize(const std::string& line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char ch = line[i];
    const int col = static_cast<int>(i) + 1;
    if (ch == '#') break;
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (line.compare(i, 3, "<->") == 0) {
      out.push_back({Token::BiArrow, "<->", col});
      i += 3;
    } else if (line.compare(i, 2, "->") == 0) {
      out.push_back({Token::Arrow, "->", col});
      i += 2;
    } else if (ch == '=' || ch == '{' || ch == '}' || ch == ',') {
      out.push_back({ch == '=' ? Token::Equals
                     : ch == '{' ? Token::LBrace
                     : ch == '}' ? Token::RBrace
                                 : Token::Comma,
                     std::string(1, ch), col});
      ++i;
    } else if (ch == '"') {
      std::string name;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '\\' && i + 1 < line.size()) {
          name += line[i + 1];
          i += 2;
        } else if (line[i] == '"') {
          closed = true;
          ++i;
          break;
        } else {
          name += line[i++];
        }
      }
      if (!closed) throw ParseError("unterminated quoted name", line_no, col);
      if (name.empty()) throw ParseError("empty name", line_no, col);
      out.push_back({Token::Word, name, col, true});
    } else if (is_name_char(ch)) {
      std::size_t j = i;
      while (j < line.size() && is_name_char(line[j])) ++j;
      out.push_back({Token::Word, line.substr(i, j - i), col});
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + ch + "'", line_no, col);
    }
  }
  out.push_back({Token::End, "", static_cast<int>(line.size()) + 1});
  return out;
}

inline bool needs_quotes(const std::string& name) {
  if (name.empty()) return true;
  for (char ch : name)
    if (!is_name_char(ch)) return true;
  return false;
}

inline std::string quote(const std::string& name) {
  if (!needs_quotes(name)) return name;
  std::string out = "\"";
  for (char ch : name) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace detail

/// Parses the line-oriented graph format:
///
///     # comment
///     node NAME
///     cluster NAME = { NAME NAME ... }
///     cluster NAME
///     edge A -> B
///     edge A <-> B
///
/// Names are bare words or double-quoted strings.
inline GraphFile parse_graph(const std::string& text) {
  struct EdgeDecl {
    Name a, b;
    bool bidirected;
    int line, col_a, col_b;
  };
  NodeSet nodes, bare_clusters;
  std::map<Name, std::pair<int, int>> declared_at;
  std::vector<Partition::Block> blocks;
  std::map<Name, std::pair<int, int>> member_at;
  std::vector<EdgeDecl> edges;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto declare = [&](const detail::Token& t, int ln) {
    if (!declared_at.emplace(t.text, std::make_pair(ln, t.column)).second)
      throw ParseError("'" + t.text + "' is declared twice", ln, t.column);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto toks = detail::tokenize(line, line_no);
    if (toks.front().kind == detail::Token::End) continue;
    std::size_t i = 0;
    auto expect = [&](detail::Token::Kind k, const char* what) -> const detail::Token& {
      if (toks[i].kind != k)
        throw ParseError(std::string("expected ") + what, line_no, toks[i].column);
      return toks[i++];
    };
    const detail::Token& kw = expect(detail::Token::Word, "a declaration");
    if (kw.quoted) throw ParseError("expected a declaration keyword", line_no, kw.column);
    if (kw.text == "node") {
      const auto& n = expect(detail::Token::Word, "a node name");
      declare(n, line_no);
      nodes.insert(n.text);
    } else if (kw.text == "cluster") {
      const auto& n = expect(detail::Token::Word, "a cluster name");
      if (toks[i].kind == detail::Token::End) {
        declare(n, line_no);
        bare_clusters.insert(n.text);
      } else {
        expect(detail::Token::Equals, "'=' or end of line");
        expect(detail::Token::LBrace, "'{'");
        for (const auto& b : blocks)
          if (b.cluster == n.text)
            throw ParseError("cluster '" + n.text + "' is declared twice", line_no, n.column);
        Partition::Block block{n.text, {}};
        while (toks[i].kind != detail::Token::RBrace) {
          if (toks[i].kind == detail::Token::Comma) {
            ++i;
            continue;
          }
          const auto& m = expect(detail::Token::Word, "a member name or '}'");
          if (!member_at.emplace(m.text, std::make_pair(line_no, m.column)).second)
            throw ParseError("'" + m.text + "' is already in a cluster", line_no, m.column);
          block.members.insert(m.text);
        }
        ++i;
        if (block.members.empty()) throw ParseError("cluster has no members", line_no, n.column);
        blocks.push_back(std::move(block));
      }
    } else if (kw.text == "edge") {
      const auto& a = expect(detail::Token::Word, "an endpoint name");
      if (toks[i].kind != detail::Token::Arrow && toks[i].kind != detail::Token::BiArrow)
        throw ParseError("expected '->' or '<->'", line_no, toks[i].column);
      const bool bi = toks[i++].kind == detail::Token::BiArrow;
      const auto& b = expect(detail::Token::Word, "an endpoint name");
      if (a.text == b.text) throw ParseError("self-loop on '" + a.text + "'", line_no, a.column);
      edges.push_back({a.text, b.text, bi, line_no, a.column, b.column});
    } else {
      throw ParseError("unknown declaration '" + kw.text + "'", line_no, kw.column);
    }
    expect(detail::Token::End, "end of line");
  }

  if (!blocks.empty() && !bare_clusters.empty()) {
    const auto& at = declared_at.at(*bare_clusters.begin());
    throw ParseError("bare cluster declarations cannot be mixed with a partition", at.first, at.second);
  }
  for (const auto& [m, at] : member_at)
    if (!nodes.count(m)) throw ParseError("undeclared node '" + m + "'", at.first, at.second);
  if (!blocks.empty())
    for (const auto& v : nodes)
      if (!member_at.count(v)) {
        const auto& at = declared_at.at(v);
        throw ParseError("node '" + v + "' is not in any cluster", at.first, at.second);
      }

  const NodeSet endpoints = set_union(nodes, bare_clusters);
  EdgeSet directed, bidirected;
  for (const auto& e : edges) {
    if (!endpoints.count(e.a)) throw ParseError("undeclared name '" + e.a + "'", e.line, e.col_a);
    if (!endpoints.count(e.b)) throw ParseError("undeclared name '" + e.b + "'", e.line, e.col_b);
    const bool fresh = e.bidirected ? bidirected.insert(canonical_bidirected(e.a, e.b)).second
                                    : directed.insert({e.a, e.b}).second;
    if (!fresh) throw ParseError("duplicate edge", e.line, e.col_a);
  }

  GraphFile out{std::nullopt, std::nullopt, ClusterDag{Admg(), std::nullopt}};
  if (!bare_clusters.empty()) {
    out.cdag.graph = Admg(endpoints, directed, bidirected);
    return out;
  }
  out.admg = Admg(nodes, directed, bidirected);
  if (blocks.empty()) {
    out.cdag.graph = *out.admg;
  } else {
    out.partition = Partition(std::move(blocks));
    out.cdag = build_cdag(*out.admg, *out.partition);
  }
  return out;
}

/// Inverse of parse_graph: parse_graph(render_graph(f)) == f.
inline std::string render_graph(const GraphFile& f) {
  std::ostringstream os;
  const Admg& g = f.admg ? *f.admg : f.cdag.graph;
  for (const auto& v : g.nodes()) os << (f.admg ? "node " : "cluster ") << detail::quote(v) << '\n';
  if (f.partition)
    for (const auto& b : f.partition->blocks()) {
      os << "cluster " << detail::quote(b.cluster) << " = {";
      for (const auto& m : b.members) os << ' ' << detail::quote(m);
      os << " }\n";
    }
  for (const auto& [a, b] : g.directed_edges())
    os << "edge " << detail::quote(a) << " -> " << detail::quote(b) << '\n';
  for (const auto& [a, b] : g.bidirected_edges())
    os << "edge " << detail::quote(a) << " <-> " << detail::quote(b) << '\n';
  return os.str();
}

inline GraphFile graph_file(const Admg& g) { return {g, std::nullopt, ClusterDag{g, std::nullopt}}; }

inline GraphFile graph_file(const Admg& g, const Partition& p) {
  return {g, p, build_cdag(g, p)};
}

inline GraphFile graph_file(const ClusterDag& c) { return {std::nullopt, std::nullopt, ClusterDag{c.graph, std::nullopt}}; }

}  // namespace cdag
