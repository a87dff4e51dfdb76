#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "supplynet/errors.hpp"
#include "supplynet/network.hpp"
#include "supplynet/parallel.hpp"
#include "supplynet/random.hpp"

namespace supplynet {

struct PercolationConfig {
  double x = 0.0;       ///< supplier failure probability
  double y = 1.0;       ///< edge survival probability; 1 is pure node percolation
  unsigned n = 1;       ///< suppliers per product
  std::uint64_t seed = 0;

  void validate() const {
    detail::require_probability(x, "x");
    detail::require_probability(y, "y");
    if (n == 0) throw ParameterError("supplier count n must be positive");
  }
};

struct CascadeOutcome {
  std::vector<std::uint8_t> survived;   ///< Z_i
  std::size_t failed = 0;               ///< F
  std::size_t survivors = 0;            ///< S
  std::vector<NodeId> spontaneous;      ///< products whose n suppliers all failed, ascending
};

/// Raw uniforms behind one trial: n per product (supplier slots, product
/// major) followed by one per edge in edges() order. A supplier fails at
/// level x iff its uniform is < x, an edge is operational iff its uniform is
/// < y. Edge uniforms are skipped entirely when y >= 1 since every edge is
/// then operational; supplier draws do not depend on y.
struct TrialDraws {
  std::vector<double> supplier;
  std::vector<double> edge;

  static TrialDraws sample(const ProductionNetwork& net, unsigned n, double y, std::uint64_t seed) {
    Rng rng(seed);
    TrialDraws d;
    d.supplier.resize(net.node_count() * n);
    for (auto& u : d.supplier) u = rng.uniform();
    if (y < 1.0) {
      d.edge.resize(net.edge_count());
      for (auto& u : d.edge) u = rng.uniform();
    }
    return d;
  }

  /// Largest supplier uniform of product v; v fails spontaneously iff this is < x.
  double spontaneous_level(NodeId v, unsigned n) const noexcept {
    double best = 0.0;
    for (unsigned s = 0; s < n; ++s) best = std::max(best, supplier[v * n + s]);
    return best;
  }

  bool edge_operational(std::size_t edge_id, double y) const noexcept {
    return edge.empty() || edge[edge_id] < y;
  }
};

namespace detail {

/// Failure closure: everything forward-reachable from the spontaneous set over
/// operational edges fails. Well defined with cycles.
inline CascadeOutcome propagate(const ProductionNetwork& net, const TrialDraws& draws, double x,
                                double y, unsigned n) {
  const std::size_t k = net.node_count();
  CascadeOutcome out;
  out.survived.assign(k, 1);
  std::vector<NodeId> queue;
  for (NodeId v = 0; v < k; ++v) {
    if (draws.spontaneous_level(v, n) < x) {
      out.spontaneous.push_back(v);
      out.survived[v] = 0;
      queue.push_back(v);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId v = queue[head];
    const auto outs = net.outputs(v);
    for (std::size_t j = 0; j < outs.size(); ++j) {
      const NodeId w = outs[j];
      if (out.survived[w] && draws.edge_operational(net.out_edge_begin(v) + j, y)) {
        out.survived[w] = 0;
        queue.push_back(w);
      }
    }
  }
  out.failed = queue.size();
  out.survivors = k - out.failed;
  return out;
}

}  // namespace detail

/// One trial of joint node + edge percolation, deterministic in cfg.seed.
inline CascadeOutcome run_trial(const ProductionNetwork& net, const PercolationConfig& cfg) {
  cfg.validate();
  const auto draws = TrialDraws::sample(net, cfg.n, cfg.y, cfg.seed);
  return detail::propagate(net, draws, cfg.x, cfg.y, cfg.n);
}

/// Outcome under explicitly supplied draws.
inline CascadeOutcome run_trial(const ProductionNetwork& net, const TrialDraws& draws, double x,
                                double y, unsigned n) {
  return detail::propagate(net, draws, x, y, n);
}

struct BatchResult {
  std::vector<std::size_t> failed;      ///< F per trial, in trial order
  std::vector<std::size_t> histogram;   ///< histogram[f] = #trials with F = f, size K + 1

  std::size_t trials() const noexcept { return failed.size(); }
  std::size_t node_count() const noexcept { return histogram.empty() ? 0 : histogram.size() - 1; }

  double mean_failed() const noexcept {
    if (failed.empty()) return 0.0;
    double s = 0.0;
    for (auto f : failed) s += static_cast<double>(f);
    return s / static_cast<double>(failed.size());
  }

  std::vector<double> pmf() const {
    std::vector<double> p(histogram.size());
    for (std::size_t f = 0; f < histogram.size(); ++f) {
      p[f] = static_cast<double>(histogram[f]) / static_cast<double>(failed.size());
    }
    return p;
  }
};

/// Trial t runs with seed derive_seed(cfg.seed, t). Identical results for
/// any worker count.
inline BatchResult run_batch(const ProductionNetwork& net, const PercolationConfig& cfg,
                             std::size_t trials, unsigned workers = 1) {
  cfg.validate();
  if (trials == 0) throw ParameterError("trials must be positive");
  BatchResult res;
  res.failed.resize(trials);
  detail::parallel_for(trials, workers, [&](std::size_t t) {
    PercolationConfig sub = cfg;
    sub.seed = derive_seed(cfg.seed, t);
    res.failed[t] = run_trial(net, sub).failed;
  });
  res.histogram.assign(net.node_count() + 1, 0);
  for (auto f : res.failed) ++res.histogram[f];
  return res;
}

/// Two outcomes at x1 <= x2 driven by the same uniforms, so the surviving set
/// at x2 is contained in the one at x1.
inline std::pair<CascadeOutcome, CascadeOutcome> run_coupled_pair(const ProductionNetwork& net,
                                                                  const PercolationConfig& cfg,
                                                                  double x1, double x2) {
  detail::require_probability(x1, "x1");
  detail::require_probability(x2, "x2");
  if (x1 > x2) throw ParameterError("coupled pair requires x1 <= x2");
  PercolationConfig c = cfg;
  c.x = x1;
  c.validate();
  const auto draws = TrialDraws::sample(net, cfg.n, cfg.y, cfg.seed);
  return {detail::propagate(net, draws, x1, cfg.y, cfg.n),
          detail::propagate(net, draws, x2, cfg.y, cfg.n)};
}

/// Per-product failure threshold of one trial: product i fails at level x iff
/// x > threshold[i]. The threshold is the smallest spontaneous level among i
/// and everything that reaches i over operational edges, so a single pass
/// answers the trial for every x at once.
///
/// Nodes are visited in increasing spontaneous level; each unassigned node
/// reached from the current one inherits its level. O(K log K + |E|).
inline std::vector<double> failure_thresholds(const ProductionNetwork& net,
                                              const TrialDraws& draws, double y, unsigned n) {
  const std::size_t k = net.node_count();
  std::vector<double> level(k);
  for (NodeId v = 0; v < k; ++v) level[v] = draws.spontaneous_level(v, n);
  std::vector<NodeId> order(k);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return level[a] < level[b] || (level[a] == level[b] && a < b);
  });
  std::vector<double> threshold(k, 0.0);
  std::vector<std::uint8_t> assigned(k, 0);
  std::vector<NodeId> queue;
  for (NodeId src : order) {
    if (assigned[src]) continue;
    const double lv = level[src];
    assigned[src] = 1;
    threshold[src] = lv;
    queue.assign(1, src);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId v = queue[head];
      const auto outs = net.outputs(v);
      for (std::size_t j = 0; j < outs.size(); ++j) {
        const NodeId w = outs[j];
        if (!assigned[w] && draws.edge_operational(net.out_edge_begin(v) + j, y)) {
          assigned[w] = 1;
          threshold[w] = lv;
          queue.push_back(w);
        }
      }
    }
  }
  return threshold;
}

}  // namespace supplynet
