#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "supplynet/branching.hpp"
#include "supplynet/errors.hpp"
#include "supplynet/network.hpp"
#include "supplynet/random.hpp"

namespace supplynet {

/// Upper limit on generated network size. Generators that would exceed it
/// throw ValidationError instead of exhausting memory.
inline constexpr std::size_t kMaxGeneratedNodes = 20'000'000;

/// Random DAG on K ordered products: every pair (l, k) with l < k becomes the
/// edge l -> k independently with probability p.
inline ProductionNetwork generate_rdag(std::size_t k, double p, std::uint64_t seed,
                                       unsigned suppliers = 1) {
  detail::require_positive(static_cast<long long>(k), "K");
  detail::require_probability(p, "p");
  Rng rng(splitmix64(seed));
  std::vector<Edge> edges;
  for (NodeId to = 1; to < k; ++to) {
    for (NodeId from = 0; from < to; ++from) {
      if (rng.bernoulli(p)) edges.push_back({from, to});
    }
  }
  return ProductionNetwork(k, std::move(edges), suppliers);
}

/// Bipartite raw/complex network: rho = max(m, ceil(mK/d)) raw materials
/// (tier 1) feed K complex products (tier 2). Each complex product gets m
/// distinct raw inputs; each raw material supplies at most d products.
///
/// Inputs are assigned one complex product at a time to the m raws with the
/// most remaining capacity, ties broken by a seeded shuffle. Keeping
/// capacities balanced this way never gets stuck.
inline ProductionNetwork generate_parallel(std::size_t k, unsigned m, unsigned d,
                                           std::uint64_t seed, unsigned suppliers = 1) {
  detail::require_positive(static_cast<long long>(k), "K");
  detail::require_positive(m, "m");
  detail::require_positive(d, "d");
  const std::size_t slots = static_cast<std::size_t>(m) * k;
  const std::size_t rho = std::max<std::size_t>(m, (slots + d - 1) / d);
  if (rho + k > kMaxGeneratedNodes) throw ValidationError("parallel network too large");

  Rng rng(splitmix64(seed));
  std::vector<unsigned> capacity(rho, d);
  std::vector<NodeId> order(rho);
  std::vector<Edge> edges;
  edges.reserve(slots);
  for (std::size_t c = 0; c < k; ++c) {
    std::iota(order.begin(), order.end(), NodeId{0});
    for (std::size_t i = rho; i > 1; --i) {
      std::swap(order[i - 1], order[rng.next() % i]);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return capacity[a] > capacity[b]; });
    for (unsigned j = 0; j < m; ++j) {
      const NodeId raw = order[j];
      // Balanced capacities guarantee m raws with room remain.
      if (capacity[raw] == 0) throw ValidationError("internal: parallel wiring infeasible");
      --capacity[raw];
      edges.push_back({raw, static_cast<NodeId>(rho + c)});
    }
  }
  std::vector<int> tiers(rho + k, 2);
  std::fill(tiers.begin(), tiers.begin() + static_cast<std::ptrdiff_t>(rho), 1);
  return ProductionNetwork(rho + k, std::move(edges), suppliers, std::move(tiers));
}

/// Number of nodes of a complete m-ary tree with D levels.
inline std::size_t tree_node_count(unsigned m, unsigned depth) {
  std::size_t total = 0;
  std::size_t level = 1;
  for (unsigned d = 1; d <= depth; ++d) {
    total += level;
    if (total > kMaxGeneratedNodes) {
      throw ValidationError("tree with fanout " + std::to_string(m) + " and depth " +
                            std::to_string(depth) + " exceeds the node limit of " +
                            std::to_string(kMaxGeneratedNodes));
    }
    level *= m;
  }
  return total;
}

/// Complete m-ary tree with D tiers: the root is the finished product at
/// tier 1 and raw materials sit at tier D. Edges point from tier d+1 to
/// tier d, so failures climb from the leaves to the root.
inline ProductionNetwork generate_backward_tree(unsigned m, unsigned depth,
                                                unsigned suppliers = 1) {
  detail::require_positive(m, "m");
  detail::require_positive(depth, "D");
  const std::size_t k = tree_node_count(m, depth);
  std::vector<Edge> edges;
  edges.reserve(k - 1);
  std::vector<int> tiers(k, 1);
  // Breadth-first ids: children of node v are m*v + 1 ... m*v + m.
  for (std::size_t v = 0; v < k; ++v) {
    for (unsigned c = 1; c <= m; ++c) {
      const std::size_t child = static_cast<std::size_t>(m) * v + c;
      if (child >= k) break;
      edges.push_back({static_cast<NodeId>(child), static_cast<NodeId>(v)});
      tiers[child] = tiers[v] + 1;
    }
  }
  return ProductionNetwork(k, std::move(edges), suppliers, std::move(tiers));
}

struct GwTree {
  ProductionNetwork network;
  /// Number of populated generations. Equals the extinction time when the
  /// process died out, or max_depth when it was cut off.
  unsigned depth = 0;
  bool truncated = false;
};

/// Forward production network grown from a single raw material by a
/// Galton-Watson process. Edges point parent -> child. Growth stops when a
/// generation is empty or after `max_depth` generations, in which case the
/// offspring of the last generation are drawn (not built) to decide whether
/// the tree was truncated.
inline GwTree generate_gw_tree(const BranchingDistribution& dist, unsigned max_depth,
                               std::uint64_t seed, unsigned suppliers = 1) {
  detail::require_positive(max_depth, "max_depth");
  Rng rng(splitmix64(seed));
  std::vector<Edge> edges;
  std::vector<int> tiers{1};
  std::vector<NodeId> current{0};
  std::size_t next_id = 1;
  unsigned depth = 1;
  bool truncated = false;
  while (!current.empty()) {
    if (depth == max_depth) {
      for (NodeId parent : current) {
        (void)parent;
        if (dist.sample(rng) > 0) truncated = true;
      }
      break;
    }
    std::vector<NodeId> next;
    for (NodeId parent : current) {
      const std::uint64_t children = dist.sample(rng);
      if (next_id + children > kMaxGeneratedNodes) {
        throw ValidationError("Galton-Watson tree exceeds the node limit of " +
                              std::to_string(kMaxGeneratedNodes));
      }
      for (std::uint64_t c = 0; c < children; ++c) {
        const auto child = static_cast<NodeId>(next_id++);
        edges.push_back({parent, child});
        tiers.push_back(static_cast<int>(depth) + 1);
        next.push_back(child);
      }
    }
    if (next.empty()) break;
    current = std::move(next);
    ++depth;
  }
  return GwTree{ProductionNetwork(next_id, std::move(edges), suppliers, std::move(tiers)), depth,
                truncated};
}

/// Width-w trellis with D tiers (K = wD). Each of the w*w possible edges
/// between consecutive tiers d -> d+1 is present independently with
/// probability p. Node ids run tier by tier.
inline ProductionNetwork generate_trellis(unsigned w, unsigned depth, double p, std::uint64_t seed,
                                          unsigned suppliers = 1) {
  detail::require_positive(w, "w");
  detail::require_positive(depth, "D");
  detail::require_probability(p, "p");
  const std::size_t k = static_cast<std::size_t>(w) * depth;
  if (k > kMaxGeneratedNodes) throw ValidationError("trellis too large");
  Rng rng(splitmix64(seed));
  std::vector<Edge> edges;
  std::vector<int> tiers(k);
  for (std::size_t v = 0; v < k; ++v) tiers[v] = static_cast<int>(v / w) + 1;
  for (unsigned d = 0; d + 1 < depth; ++d) {
    for (unsigned i = 0; i < w; ++i) {
      for (unsigned j = 0; j < w; ++j) {
        if (rng.bernoulli(p)) {
          edges.push_back({static_cast<NodeId>(d * w + i), static_cast<NodeId>((d + 1) * w + j)});
        }
      }
    }
  }
  return ProductionNetwork(k, std::move(edges), suppliers, std::move(tiers));
}

/// Path 1 -> 2 -> ... -> K.
inline ProductionNetwork generate_chain(std::size_t k, unsigned suppliers = 1) {
  detail::require_positive(static_cast<long long>(k), "K");
  std::vector<Edge> edges;
  for (NodeId v = 0; v + 1 < k; ++v) edges.push_back({v, v + 1});
  return ProductionNetwork(k, std::move(edges), suppliers);
}

/// One raw material (node 1) supplying K - 1 products.
inline ProductionNetwork generate_star(std::size_t k, unsigned suppliers = 1) {
  detail::require_positive(static_cast<long long>(k), "K");
  std::vector<Edge> edges;
  for (NodeId v = 1; v < k; ++v) edges.push_back({0, v});
  return ProductionNetwork(k, std::move(edges), suppliers);
}

}  // namespace supplynet
