#pragma once

#include <fstream>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdag/docalc.hpp"
#include "cdag/evaluate.hpp"
#include "cdag/graph_file.hpp"
#include "cdag/identify.hpp"
#include "cdag/sampler.hpp"
#include "cdag/simulate.hpp"

namespace cdag::cli {

enum ExitCode { kOk = 0, kNegative = 1, kUsage = 2, kInput = 3 };

namespace detail {

struct UsageError : Error {
  using Error::Error;
};
struct InputError : Error {
  using Error::Error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline GraphFile load_graph(const std::string& path) {
  try {
    return parse_graph(read_file(path));
  } catch (const ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

inline NodeSet to_set(const std::vector<std::string>& v) { return NodeSet(v.begin(), v.end()); }

inline std::map<Name, int> parse_pairs(const std::vector<std::string>& items, const char* what) {
  std::map<Name, int> out;
  for (const auto& item : items) {
    const auto eq = item.rfind('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw UsageError(std::string("expected NAME=VALUE in ") + what + ", got '" + item + "'");
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() - eq - 1) throw UsageError("bad number in '" + item + "'");
    if (!out.emplace(item.substr(0, eq), value).second)
      throw UsageError("'" + item.substr(0, eq) + "' given twice in " + what);
  }
  return out;
}

inline std::string number(double v, int precision = 12) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(precision) << v;
  return os.str();
}

inline std::string edges_text(const Admg& g) {
  std::string s;
  for (const auto& [a, b] : g.directed_edges()) s += (s.empty() ? "" : ", ") + a + " -> " + b;
  for (const auto& [a, b] : g.bidirected_edges()) s += (s.empty() ? "" : ", ") + a + " <-> " + b;
  return s.empty() ? "(none)" : s;
}

inline nlohmann::ordered_json graph_json(const Admg& g) {
  nlohmann::ordered_json j;
  j["nodes"] = g.nodes();
  j["directed"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : g.directed_edges()) j["directed"].push_back({a, b});
  j["bidirected"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : g.bidirected_edges()) j["bidirected"].push_back({a, b});
  return j;
}

inline RenderFormat parse_format(const std::string& f) {
  if (f == "text") return RenderFormat::Text;
  if (f == "latex") return RenderFormat::Latex;
  if (f == "json") return RenderFormat::Json;
  throw UsageError("unknown format '" + f + "'");
}

struct PolicyOptions {
  std::string internal = "random";
  std::string cross = "random";
  double edge_density = 0.5;
  double bidirected_density = 0.3;
  double cross_density = 0.2;
  std::vector<std::string> sizes;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--sizes", sizes, "cluster sizes as NAME=N (default 1)")->delimiter(',');
    app->add_option("--policy", internal, "internal structure: random|chain|full|empty")
        ->capture_default_str();
    app->add_option("--cross", cross, "cross-cluster wiring: minimal|random|full")->capture_default_str();
    app->add_option("--edge-density", edge_density, "internal directed edge probability")
        ->capture_default_str();
    app->add_option("--bidirected-density", bidirected_density,
                    "internal bidirected edge probability")
        ->capture_default_str();
    app->add_option("--cross-density", cross_density, "extra cross edge probability")
        ->capture_default_str();
    app->add_option("--seed", seed, "random seed")->capture_default_str();
  }

  ExpansionSpec spec(const ClusterDag& c) const {
    ExpansionSpec s;
    for (const auto& cl : c.clusters()) s.sizes[cl] = 1;
    for (const auto& [cl, n] : parse_pairs(sizes, "--sizes")) {
      if (!c.graph.has_node(cl)) throw UsageError("unknown cluster '" + cl + "' in --sizes");
      s.sizes[cl] = n;
    }
    if (internal == "random")
      s.internal = InternalPolicy::random(edge_density, bidirected_density);
    else if (internal == "chain")
      s.internal = InternalPolicy::chain();
    else if (internal == "full")
      s.internal = InternalPolicy::full();
    else if (internal == "empty")
      s.internal = InternalPolicy::empty();
    else
      throw UsageError("unknown --policy '" + internal + "'");
    if (cross == "minimal")
      s.cross = CrossPolicy::minimal_witness();
    else if (cross == "random")
      s.cross = CrossPolicy::random(cross_density);
    else if (cross == "full")
      s.cross = CrossPolicy::full();
    else
      throw UsageError("unknown --cross '" + cross + "'");
    s.seed = seed;
    return s;
  }
};

inline void print_hedge(std::ostream& out, const Hedge& h) {
  out << "hedge root set R = " << ::cdag::detail::set_text(h.root_set) << '\n';
  out << "F  = " << ::cdag::detail::set_text(h.forest_f.nodes()) << " with edges "
      << edges_text(h.forest_f) << '\n';
  out << "F' = " << ::cdag::detail::set_text(h.forest_fprime.nodes()) << " with edges "
      << edges_text(h.forest_fprime) << '\n';
  out << "F intersects X at " << ::cdag::detail::set_text(h.intersected_x) << '\n';
}

}  // namespace detail

/// Runs one command line (without the program name). Output goes to `out`,
/// diagnostics to `err`; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Causal identification on cluster DAGs", "cdag"};
  app.require_subcommand(1);

  std::string file, other, formula_path, table_path, graph_path, format = "text";
  std::vector<std::string> xs, ys, zs, ws, at, ns;
  int rule = 0;
  std::size_t diagrams = 20, datasets = 20;
  double pseudo = 1e-3;
  PolicyOptions policy;

  auto add_sets = [&](CLI::App* s, bool z, bool w) {
    s->add_option("-x", xs, "intervened or source names")->delimiter(',');
    s->add_option("-y", ys, "outcome or target names")->delimiter(',')->required();
    if (z) s->add_option("-z", zs, "conditioning names")->delimiter(',');
    if (w) s->add_option("-w", ws, "additional observed names")->delimiter(',');
  };

  auto* check = app.add_subcommand("check", "validate a graph file; optionally test compatibility");
  check->add_option("file", file, "graph file")->required();
  check->add_option("--against", other, "C-DAG file to test compatibility against");

  auto* dsep = app.add_subcommand("dsep", "d-separation between cluster sets");
  dsep->add_option("file", file, "graph file")->required();
  add_sets(dsep, true, false);

  auto* docalc = app.add_subcommand("docalc", "test a do-calculus rule");
  docalc->add_option("file", file, "graph file")->required();
  docalc->add_option("--rule", rule, "rule number")->required()->check(CLI::Range(1, 3));
  add_sets(docalc, true, true);

  auto* ident = app.add_subcommand("identify", "identify P(y | do(x))");
  ident->add_option("file", file, "graph file")->required();
  add_sets(ident, false, false);
  ident->add_option("--format", format, "text|latex|json")->capture_default_str();

  auto* expand_cmd = app.add_subcommand("expand", "sample a compatible diagram");
  expand_cmd->add_option("file", file, "C-DAG file")->required();
  policy.attach(expand_cmd);

  auto* eval = app.add_subcommand("eval", "evaluate a formula on a joint table");
  eval->add_option("formula", formula_path, "formula JSON")->required();
  eval->add_option("table", table_path, "joint table CSV")->required();
  eval->add_option("--at", at, "values of the free variables as NAME=V")->delimiter(',');
  eval->add_option("--graph", graph_path, "graph file whose partition groups the table");

  auto* sim = app.add_subcommand("simulate", "compare C-DAG and diagram estimates");
  sim->add_option("file", file, "C-DAG file")->required();
  add_sets(sim, false, false);
  sim->add_option("--diagrams", diagrams, "number of sampled diagrams")->capture_default_str();
  sim->add_option("--datasets", datasets, "data sets per diagram and size")->capture_default_str();
  sim->add_option("--n", ns, "sample sizes")->delimiter(',');
  sim->add_option("--pseudo-count", pseudo, "smoothing added to every table cell")
      ->capture_default_str();
  policy.attach(sim);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) {
      GraphFile f;
      try {
        f = load_graph(file);
      } catch (const InadmissibleError& e) {
        out << "inadmissible: cluster cycle " << join_cycle(e.cycle()) << '\n';
        return kNegative;
      }
      if (!other.empty()) {
        const GraphFile c = load_graph(other);
        if (!f.admg || !f.partition)
          throw UsageError("compatibility needs a diagram with a partition as the first file");
        const bool ok = f.partition->clusters() == c.cdag.clusters() &&
                        is_compatible(*f.admg, c.cdag, *f.partition);
        out << (ok ? "compatible" : "not compatible") << '\n';
        return ok ? kOk : kNegative;
      }
      if (f.partition)
        out << "admissible partition: " << f.admg->size() << " variables in "
            << f.cdag.clusters().size() << " clusters\n";
      else if (f.admg)
        out << "valid diagram: " << f.admg->size() << " nodes\n";
      else
        out << "valid C-DAG: " << f.cdag.clusters().size() << " clusters\n";
      out << "cluster edges: " << edges_text(f.cdag.graph) << '\n';
      return kOk;
    }

    if (*dsep) {
      const GraphFile f = load_graph(file);
      const bool sep = cdag_d_separated(f.cdag, to_set(xs), to_set(ys), to_set(zs));
      out << ::cdag::detail::set_text(to_set(xs)) << " _||_ " << ::cdag::detail::set_text(to_set(ys))
          << " | " << ::cdag::detail::set_text(to_set(zs)) << ": "
          << (sep ? "separated" : "not separated") << '\n';
      return sep ? kOk : kNegative;
    }

    if (*docalc) {
      const GraphFile f = load_graph(file);
      const RuleVerdict v = apply_rule(static_cast<Rule>(rule), f.cdag,
                                       DoQuery{to_set(xs), to_set(ys), to_set(zs), to_set(ws)});
      out << "rule " << rule << (v.applies ? " applies" : " does not apply") << '\n';
      out << "tested: " << v.separation_tested << '\n';
      if (v.rule == Rule::R3) out << "Z(W) = " << ::cdag::detail::set_text(v.z_of_w) << '\n';
      if (v.applies) out << "licensed: " << v.equality_granted << '\n';
      return v.applies ? kOk : kNegative;
    }

    if (*ident) {
      const RenderFormat fmt = parse_format(format);
      const GraphFile f = load_graph(file);
      const IdResult r = identify(f.cdag, to_set(xs), to_set(ys));
      if (r.identified()) {
        if (fmt == RenderFormat::Json)
          out << to_json(r.expr()).dump(2) << '\n';
        else
          out << render(r.expr(), fmt) << '\n';
        return kOk;
      }
      const Hedge& h = r.hedge();
      if (fmt == RenderFormat::Json) {
        nlohmann::ordered_json j;
        j["identified"] = false;
        j["root_set"] = h.root_set;
        j["forest_F"] = graph_json(h.forest_f);
        j["forest_Fprime"] = graph_json(h.forest_fprime);
        j["intersected_x"] = h.intersected_x;
        out << j.dump(2) << '\n';
      } else {
        out << "not identifiable: "
            << ::cdag::detail::prob_text(to_set(ys), to_set(xs), {}) << '\n';
        print_hedge(out, h);
      }
      return kNegative;
    }

    if (*expand_cmd) {
      const GraphFile f = load_graph(file);
      const Expansion ex = expand(f.cdag, policy.spec(f.cdag));
      out << render_graph(graph_file(ex.graph, ex.partition));
      return kOk;
    }

    if (*eval) {
      ProbExpr e = ProbExpr::one();
      try {
        e = from_json(nlohmann::json::parse(read_file(formula_path)));
      } catch (const nlohmann::json::exception& ex) {
        throw InputError(formula_path + ": " + ex.what());
      } catch (const ParseError& ex) {
        throw InputError(formula_path + ": " + ex.what());
      }
      std::istringstream csv(read_file(table_path));
      JointTable t;
      try {
        t = JointTable::read_csv(csv);
      } catch (const ParseError& ex) {
        throw InputError(table_path + ":" + ex.what());
      } catch (const InvalidQueryError& ex) {
        throw InputError(table_path + ": " + ex.what());
      }
      if (!graph_path.empty()) {
        const GraphFile g = load_graph(graph_path);
        if (g.partition) t = t.group(*g.partition);
      }
      const auto values = parse_pairs(at, "--at");
      for (const auto& v : e.free_variables())
        if (!values.count(v)) throw UsageError("no value given for free variable '" + v + "'");
      out << number(evaluate(e, t, Assignment(values.begin(), values.end())), 17) << '\n';
      return kOk;
    }

    if (*sim) {
      const GraphFile f = load_graph(file);
      SimulationConfig cfg;
      cfg.x = to_set(xs);
      cfg.y = to_set(ys);
      cfg.spec = policy.spec(f.cdag);
      cfg.diagrams = diagrams;
      cfg.datasets = datasets;
      cfg.pseudo_count = pseudo;
      for (const auto& s : ns) {
        std::size_t used = 0;
        long long n = -1;
        try {
          n = std::stoll(s, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != s.size() || n < 1) throw UsageError("bad sample size '" + s + "'");
        cfg.ns.push_back(static_cast<std::size_t>(n));
      }
      out << "metric,n,mean,std_err,max,count\n";
      for (const auto& row : simulate(f.cdag, cfg))
        out << row.metric << ',' << row.n << ',' << number(row.mean) << ',' << number(row.std_err)
            << ',' << number(row.max) << ',' << row.count << '\n';
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const InadmissibleError& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const InvalidGraphError& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const PartitionError& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const StateSpaceError& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const ZeroConditioningMass& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const Error& e) {
    // Unknown names, malformed query sets, inapplicable requests.
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace cdag::cli
