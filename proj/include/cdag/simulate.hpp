#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cdag/evaluate.hpp"
#include "cdag/identify.hpp"
#include "cdag/oracle.hpp"
#include "cdag/sampler.hpp"

namespace cdag {

struct SimulationConfig {
  NodeSet x, y;
  ExpansionSpec spec;  // sizes, policies and the master seed
  std::size_t diagrams = 20;
  std::size_t datasets = 20;
  std::vector<std::size_t> ns;
  double pseudo_count = 1e-3;
};

struct SimulationRow {
  std::string metric;
  std::size_t n = 0;
  double mean = 0.0;
  double std_err = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

namespace detail {

struct Accumulator {
  double sum = 0.0, sum_sq = 0.0, max = 0.0;
  std::size_t count = 0;
  void add(double v) {
    max = std::max(max, v);
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  SimulationRow row(std::string metric, std::size_t n) const {
    SimulationRow r{std::move(metric), n, 0.0, 0.0, max, count};
    if (count == 0) return r;
    r.mean = sum / static_cast<double>(count);
    if (count > 1) {
      const double var = std::max(0.0, (sum_sq - sum * r.mean) / static_cast<double>(count - 1));
      r.std_err = std::sqrt(var / static_cast<double>(count));
    }
    return r;
  }
};

/// P(y = 1 | do(x = 1)) − P(y = 1 | do(x = 0)) with every variable of x and y
/// at the given value, read from an identification formula.
inline double effect(const ProbExpr& e, const JointTable& t, const Assignment& x1,
                     const Assignment& x0, const Assignment& y1) {
  Evaluator ev(t);
  Assignment a1 = y1, a0 = y1;
  a1.insert(x1.begin(), x1.end());
  a0.insert(x0.begin(), x0.end());
  return ev(e, a1) - ev(e, a0);
}

inline Assignment cluster_state(const NodeSet& clusters, int state) {
  Assignment a;
  for (const auto& c : clusters) a[c] = state;
  return a;
}

/// Variable values encoding cluster state `state` for every cluster in
/// `clusters` (members in name order, last fastest).
inline Assignment member_state(const Partition& p, const std::map<Name, int>& cards,
                               const NodeSet& clusters, int state) {
  Assignment a;
  for (const auto& c : clusters) {
    const auto& members = p.members(c);
    int s = state;
    for (auto it = members.rbegin(); it != members.rend(); ++it) {
      a[*it] = s % cards.at(*it);
      s /= cards.at(*it);
    }
  }
  return a;
}

}  // namespace detail

/// For `diagrams` random expansions of `c`: the fraction on which P(y|do(x))
/// is identifiable and, when `c` itself identifies the effect, the mean
/// |effect from the C-DAG formula − effect from the diagram's own formula|
/// on exact distributions and on `datasets` samples of each size in `ns`.
///
/// Seeds: diagram k uses derive_seed(seed, k) for its structure and
/// derive_seed(seed ^ 0xC2B2AE3D27D4EB4F, k) for its parameters; dataset m at
/// size index i uses derive_seed(parameter seed, i * datasets + m).
inline std::vector<SimulationRow> simulate(const ClusterDag& c, const SimulationConfig& cfg) {
  const IdResult cdag_result = identify(c, cfg.x, cfg.y);
  std::vector<detail::Accumulator> sampled(cfg.ns.size());
  detail::Accumulator exact, identified;

  for (std::size_t k = 0; k < cfg.diagrams; ++k) {
    ExpansionSpec spec = cfg.spec;
    spec.seed = derive_seed(cfg.spec.seed, k);
    const Expansion ex = expand(c, spec);
    const NodeSet xv = ex.partition.expand(cfg.x), yv = ex.partition.expand(cfg.y);
    const IdResult g_result = identify(ex.graph, xv, yv);
    identified.add(g_result.identified() ? 1.0 : 0.0);
    if (!cdag_result.identified() || !g_result.identified()) continue;

    const std::uint64_t param_seed = derive_seed(cfg.spec.seed ^ 0xC2B2AE3D27D4EB4FULL, k);
    const DiscreteCbn model = random_cbn(ex.graph, param_seed);
    const auto x1c = detail::cluster_state(cfg.x, 1), x0c = detail::cluster_state(cfg.x, 0);
    const auto y1c = detail::cluster_state(cfg.y, 1);
    const auto x1v = detail::member_state(ex.partition, model.cards(), cfg.x, 1);
    const auto x0v = detail::member_state(ex.partition, model.cards(), cfg.x, 0);
    const auto y1v = detail::member_state(ex.partition, model.cards(), cfg.y, 1);
    auto difference = [&](const JointTable& t) {
      const double via_cdag = detail::effect(cdag_result.expr(), t.group(ex.partition), x1c, x0c, y1c);
      const double via_g = detail::effect(g_result.expr(), t, x1v, x0v, y1v);
      return std::abs(via_cdag - via_g);
    };

    exact.add(difference(joint_distribution(model)));
    for (std::size_t i = 0; i < cfg.ns.size(); ++i)
      for (std::size_t m = 0; m < cfg.datasets; ++m) {
        const auto rows =
            sample_dataset(model, cfg.ns[i], derive_seed(param_seed, i * cfg.datasets + m));
        const JointTable t = JointTable::from_samples(model.variables(), model.card_vector(), rows,
                                                      cfg.pseudo_count);
        sampled[i].add(difference(t));
      }
  }

  std::vector<SimulationRow> out;
  if (cdag_result.identified()) {
    for (std::size_t i = 0; i < cfg.ns.size(); ++i)
      out.push_back(sampled[i].row("abs_effect_diff", cfg.ns[i]));
    out.push_back(exact.row("exact_abs_effect_diff", 0));
  }
  out.push_back(identified.row("id_fraction", 0));
  return out;
}

}  // namespace cdag
