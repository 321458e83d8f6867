#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "cdag/expansion.hpp"
#include "cdag/rng.hpp"

namespace cdag {

/// Structure inside each cluster of an expansion.
struct InternalPolicy {
  enum Kind { Random, Chain, Full, Empty };
  Kind kind = Random;
  double edge_density = 0.5;
  double bidirected_density = 0.3;

  static InternalPolicy random(double edge, double bidirected) { return {Random, edge, bidirected}; }
  static InternalPolicy chain() { return {Chain, 0.0, 0.0}; }
  static InternalPolicy full() { return {Full, 1.0, 1.0}; }
  static InternalPolicy empty() { return {Empty, 0.0, 0.0}; }
};

/// Variable edges realizing each cluster edge.
struct CrossPolicy {
  enum Kind { MinimalWitness, Random, Full };
  Kind kind = MinimalWitness;
  double density = 0.0;

  static CrossPolicy minimal_witness() { return {MinimalWitness, 0.0}; }
  static CrossPolicy random(double density) { return {Random, density}; }
  static CrossPolicy full() { return {Full, 1.0}; }
};

struct ExpansionSpec {
  ClusterSizes sizes;
  InternalPolicy internal;
  CrossPolicy cross;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_density(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidQueryError("densities must lie in [0, 1]");
}

/// Variable edges for one cluster edge between variable lists `a` and `b`.
template <typename Add>
void wire_cross(const std::vector<Name>& a, const std::vector<Name>& b, const CrossPolicy& policy,
                Rng& rng, Add&& add) {
  switch (policy.kind) {
    case CrossPolicy::MinimalWitness: add(a.front(), b.front()); break;
    case CrossPolicy::Full:
      for (const auto& va : a)
        for (const auto& vb : b) add(va, vb);
      break;
    case CrossPolicy::Random: {
      const std::size_t wa = rng.below(a.size()), wb = rng.below(b.size());
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
          if ((i == wa && j == wb) || rng.bernoulli(policy.density)) add(a[i], b[j]);
      break;
    }
  }
}

}  // namespace detail

/// A diagram compatible with `c`. Internal directed edges always point forward
/// in a per-cluster order and cross edges follow cluster edges, so the result
/// is acyclic by construction; every cluster edge gets at least one witness
/// variable edge and no other cross edges exist, so the quotient is exactly c.
inline Expansion expand(const ClusterDag& c, const ExpansionSpec& spec) {
  detail::check_density(spec.internal.edge_density);
  detail::check_density(spec.internal.bidirected_density);
  detail::check_density(spec.cross.density);
  auto layout = expansion_layout(c, spec.sizes);
  Rng rng(spec.seed);

  NodeSet nodes;
  EdgeSet directed, bidirected;
  std::vector<Partition::Block> blocks;
  for (auto& [cl, vars] : layout) {
    nodes.insert(vars.begin(), vars.end());
    blocks.push_back({cl, NodeSet(vars.begin(), vars.end())});
    std::vector<Name> order = vars;
    switch (spec.internal.kind) {
      case InternalPolicy::Empty: break;
      case InternalPolicy::Chain:
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
          directed.insert({order[k], order[k + 1]});
          bidirected.insert(canonical_bidirected(order[k], order[k + 1]));
        }
        break;
      case InternalPolicy::Full:
        for (std::size_t i = 0; i < order.size(); ++i)
          for (std::size_t j = i + 1; j < order.size(); ++j) {
            directed.insert({order[i], order[j]});
            bidirected.insert(canonical_bidirected(order[i], order[j]));
          }
        break;
      case InternalPolicy::Random:
        rng.shuffle(order);
        for (std::size_t i = 0; i < order.size(); ++i)
          for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (rng.bernoulli(spec.internal.edge_density)) directed.insert({order[i], order[j]});
            if (rng.bernoulli(spec.internal.bidirected_density))
              bidirected.insert(canonical_bidirected(order[i], order[j]));
          }
        break;
    }
  }
  for (const auto& [a, b] : c.graph.directed_edges())
    detail::wire_cross(layout.at(a), layout.at(b), spec.cross, rng,
                       [&](const Name& va, const Name& vb) { directed.insert({va, vb}); });
  for (const auto& [a, b] : c.graph.bidirected_edges())
    detail::wire_cross(layout.at(a), layout.at(b), spec.cross, rng, [&](const Name& va, const Name& vb) {
      bidirected.insert(canonical_bidirected(va, vb));
    });
  return Expansion{Admg(std::move(nodes), directed, bidirected), Partition(std::move(blocks))};
}

/// `count` expansions; item i uses seed derive_seed(spec.seed, i).
inline std::vector<Expansion> sample_batch(const ClusterDag& c, const ExpansionSpec& spec,
                                           std::size_t count) {
  std::vector<Expansion> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ExpansionSpec item = spec;
    item.seed = derive_seed(spec.seed, i);
    out.push_back(expand(c, item));
  }
  return out;
}

}  // namespace cdag
