#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "supplynet/errors.hpp"

namespace supplynet {

using NodeId = std::uint32_t;

/// Directed supply relation: `from` is a required input of `to`.
struct Edge {
  NodeId from;
  NodeId to;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable production network.
///
/// Nodes are dense 0-based indices internally; every file format and report
/// exposes them 1-based. Forward (outputs) and reverse (inputs) adjacency are
/// both materialized in compressed form, sorted by node id, so percolation
/// and Katz iterations are O(K + |E|) without extra allocations.
class ProductionNetwork {
 public:
  ProductionNetwork() = default;

  /// Throws ValidationError on self-loops, duplicate edges or out-of-range
  /// endpoints, and ParameterError when `suppliers` is zero.
  ProductionNetwork(std::size_t node_count, std::vector<Edge> edges, unsigned suppliers = 1,
                    std::optional<std::vector<int>> tiers = std::nullopt)
      : k_(node_count), n_(suppliers), edges_(std::move(edges)), tiers_(std::move(tiers)) {
    if (n_ == 0) throw ParameterError("supplier count n must be positive");
    if (tiers_ && tiers_->size() != k_) {
      throw ValidationError("tier labels must cover every node");
    }
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& ed = edges_[e];
      if (ed.from >= k_ || ed.to >= k_) {
        throw ValidationError("edge endpoint out of range: (" + std::to_string(ed.from + 1) + "," +
                              std::to_string(ed.to + 1) + ")");
      }
      if (ed.from == ed.to) {
        throw ValidationError("self-loop on node " + std::to_string(ed.from + 1));
      }
      if (e > 0 && edges_[e - 1] == ed) {
        throw ValidationError("duplicate edge (" + std::to_string(ed.from + 1) + "," +
                              std::to_string(ed.to + 1) + ")");
      }
    }
    build_adjacency();
    acyclic_ = compute_acyclic();
  }

  std::size_t node_count() const noexcept { return k_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  unsigned suppliers() const noexcept { return n_; }
  bool acyclic() const noexcept { return acyclic_; }

  /// Edges sorted lexicographically by (from, to).
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// Products that use `v` as an input.
  std::span<const NodeId> outputs(NodeId v) const noexcept {
    return {out_targets_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
  }

  /// Inputs required by `v` (the set N(v)).
  std::span<const NodeId> inputs(NodeId v) const noexcept {
    return {in_sources_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
  }

  /// Index into edges() of each entry of inputs(v), aligned position by position.
  std::span<const std::size_t> input_edge_ids(NodeId v) const noexcept {
    return {in_edge_ids_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
  }

  /// Out-edges of v occupy the contiguous range [out_edge_begin(v), out_edge_begin(v) +
  /// out_degree(v)) of edges(), in the same order as outputs(v).
  std::size_t out_edge_begin(NodeId v) const noexcept { return out_offsets_[v]; }

  std::size_t out_degree(NodeId v) const noexcept { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(NodeId v) const noexcept { return in_offsets_[v + 1] - in_offsets_[v]; }

  /// Maximum out-degree (Delta). Zero for an edgeless network.
  std::size_t max_out_degree() const noexcept {
    std::size_t best = 0;
    for (NodeId v = 0; v < k_; ++v) best = std::max(best, out_degree(v));
    return best;
  }

  /// Maximum in-degree, i.e. the maximum out-degree of the reverse graph.
  std::size_t max_in_degree() const noexcept {
    std::size_t best = 0;
    for (NodeId v = 0; v < k_; ++v) best = std::max(best, in_degree(v));
    return best;
  }

  bool is_raw(NodeId v) const noexcept { return in_degree(v) == 0; }

  const std::optional<std::vector<int>>& tiers() const noexcept { return tiers_; }

  /// Copy with a different uniform supplier count.
  ProductionNetwork with_suppliers(unsigned n) const {
    return ProductionNetwork(k_, edges_, n, tiers_);
  }

  friend bool operator==(const ProductionNetwork& a, const ProductionNetwork& b) {
    return a.k_ == b.k_ && a.n_ == b.n_ && a.edges_ == b.edges_ && a.tiers_ == b.tiers_;
  }

 private:
  void build_adjacency() {
    out_offsets_.assign(k_ + 1, 0);
    in_offsets_.assign(k_ + 1, 0);
    for (const auto& e : edges_) {
      ++out_offsets_[e.from + 1];
      ++in_offsets_[e.to + 1];
    }
    for (std::size_t v = 0; v < k_; ++v) {
      out_offsets_[v + 1] += out_offsets_[v];
      in_offsets_[v + 1] += in_offsets_[v];
    }
    out_targets_.resize(edges_.size());
    in_sources_.resize(edges_.size());
    in_edge_ids_.resize(edges_.size());
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    // edges_ is sorted by (from, to), so both adjacency lists come out sorted.
    for (std::size_t id = 0; id < edges_.size(); ++id) {
      const auto& e = edges_[id];
      out_targets_[out_fill[e.from]++] = e.to;
      in_sources_[in_fill[e.to]] = e.from;
      in_edge_ids_[in_fill[e.to]++] = id;
    }
  }

  bool compute_acyclic() const {
    std::vector<std::size_t> indeg(k_);
    std::vector<NodeId> stack;
    for (NodeId v = 0; v < k_; ++v) {
      indeg[v] = in_degree(v);
      if (indeg[v] == 0) stack.push_back(v);
    }
    std::size_t seen = 0;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      ++seen;
      for (NodeId w : outputs(v)) {
        if (--indeg[w] == 0) stack.push_back(w);
      }
    }
    return seen == k_;
  }

  std::size_t k_ = 0;
  unsigned n_ = 1;
  std::vector<Edge> edges_;
  std::optional<std::vector<int>> tiers_;
  bool acyclic_ = true;

  std::vector<std::size_t> out_offsets_{0};
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<NodeId> in_sources_;
  std::vector<std::size_t> in_edge_ids_;
};

/// Topological order with ties resolved by smallest node id first (Kahn's
/// algorithm over a min-heap). Throws CyclicGraphError naming an edge that
/// lies on a cycle.
inline std::vector<NodeId> topological_order(const ProductionNetwork& net) {
  const std::size_t k = net.node_count();
  std::vector<std::size_t> indeg(k);
  std::vector<NodeId> heap;
  for (NodeId v = 0; v < k; ++v) {
    indeg[v] = net.in_degree(v);
    if (indeg[v] == 0) heap.push_back(v);
  }
  auto cmp = std::greater<NodeId>{};
  std::make_heap(heap.begin(), heap.end(), cmp);
  std::vector<NodeId> order;
  order.reserve(k);
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const NodeId v = heap.back();
    heap.pop_back();
    order.push_back(v);
    for (NodeId w : net.outputs(v)) {
      if (--indeg[w] == 0) {
        heap.push_back(w);
        std::push_heap(heap.begin(), heap.end(), cmp);
      }
    }
  }
  if (order.size() == k) return order;

  // Every unprocessed node has an unprocessed input; walking inputs backwards
  // must revisit a node, which closes a cycle.
  NodeId start = 0;
  while (indeg[start] == 0) ++start;
  std::vector<int> visit(k, -1);
  NodeId cur = start;
  for (int step = 0;; ++step) {
    visit[cur] = step;
    NodeId pred = cur;
    for (NodeId u : net.inputs(cur)) {
      if (indeg[u] != 0) {
        pred = u;
        break;
      }
    }
    if (visit[pred] >= 0) {
      throw CyclicGraphError("network contains a cycle through edge (" + std::to_string(pred + 1) +
                                 "," + std::to_string(cur + 1) + ")",
                             pred, cur);
    }
    cur = pred;
  }
}

/// Same nodes, every edge flipped (supply relations become sourcing relations).
inline ProductionNetwork reverse_graph(const ProductionNetwork& net) {
  std::vector<Edge> flipped;
  flipped.reserve(net.edge_count());
  for (const auto& e : net.edges()) flipped.push_back({e.to, e.from});
  return ProductionNetwork(net.node_count(), std::move(flipped), net.suppliers(), net.tiers());
}

}  // namespace supplynet
