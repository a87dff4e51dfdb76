#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "supplynet/contagion.hpp"
#include "supplynet/errors.hpp"
#include "supplynet/network.hpp"

namespace supplynet {

/// Katz centrality of the reverse graph, (I - y A)^-1 1: weighted count of
/// walks leaving each node. Needs a convergent series, which holds for any y
/// on a DAG and for y < 1/Delta_R in general.
inline std::vector<double> reverse_katz_centrality(const ProductionNetwork& net, double y) {
  detail::require_probability(y, "y");
  if (!net.acyclic() && !(y * static_cast<double>(net.max_in_degree()) < 1.0)) {
    throw PreconditionError("reverse Katz centrality on a cyclic network requires y < 1/Delta_R = 1/" +
                            std::to_string(net.max_in_degree()));
  }
  return detail::katz_solve(reverse_graph(net), y, std::vector<double>(net.node_count(), 1.0));
}

/// Nodes by decreasing score, ties by ascending id.
inline std::vector<NodeId> decreasing_order(const std::vector<double>& score) {
  std::vector<NodeId> order(score.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return score[a] > score[b]; });
  return order;
}

namespace detail {

/// 0 < y < 1/max(Delta, Delta_R) and 0 < x < (1 - y max(Delta, Delta_R))^(1/n).
inline void require_protection_conditions(const ProductionNetwork& net, double x, double y,
                                          unsigned n) {
  const std::size_t dout = net.max_out_degree();
  const std::size_t din = net.max_in_degree();
  const std::size_t dmax = std::max(dout, din);
  if (!(y > 0.0 && y < 1.0)) throw PreconditionError("y must lie strictly between 0 and 1");
  if (!(y * static_cast<double>(dmax) < 1.0)) {
    const bool out_side = dout >= din;
    throw PreconditionError(std::string("protection requires y < 1/max(Delta, Delta_R); violated by ") +
                            (out_side ? "Delta = " : "Delta_R = ") + std::to_string(dmax));
  }
  const double xcap = std::pow(1.0 - y * static_cast<double>(dmax), 1.0 / static_cast<double>(n));
  if (!(x > 0.0 && x < xcap)) {
    throw PreconditionError("protection requires 0 < x < (1 - y max(Delta, Delta_R))^(1/n) = " +
                            std::to_string(xcap));
  }
}

inline bool prop1_conditions_hold(const ProductionNetwork& net, double x, double y, unsigned n) {
  const auto delta = static_cast<double>(net.max_out_degree());
  return y > 0.0 && y * delta < 1.0 && x > 0.0 &&
         x < std::pow(1.0 - y * delta, 1.0 / static_cast<double>(n));
}

inline double unprotected_weight(const std::vector<double>& gamma_r,
                                 const std::vector<std::uint8_t>& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < gamma_r.size(); ++i) {
    if (!t[i]) s += gamma_r[i];
  }
  return s;
}

}  // namespace detail

struct InterventionEvaluation {
  std::vector<double> beta_hat;
  double objective = 0.0;  ///< 1^T beta_hat
  /// True when beta_hat is the closed form x^n (I - y A^T)^-1 (1 - t); false
  /// when the fixed point was used instead and optimality of a plan built on
  /// it is not guaranteed.
  bool closed_form = true;
};

/// Protected products lose their spontaneous failure term but can still fail
/// through their inputs.
inline InterventionEvaluation evaluate_intervention(const ProductionNetwork& net,
                                                    const std::vector<std::uint8_t>& t, double x,
                                                    double y, unsigned n) {
  detail::check_beta_args(x, y, n);
  if (t.size() != net.node_count()) throw ParameterError("protection vector must have K entries");
  const double xn = detail::pow_n(x, n);
  std::vector<double> spont(net.node_count());
  for (std::size_t i = 0; i < spont.size(); ++i) spont[i] = t[i] ? 0.0 : xn;
  InterventionEvaluation ev;
  if (detail::prop1_conditions_hold(net, x, y, n)) {
    ev.beta_hat = detail::katz_solve(net, y, spont);
  } else {
    ev.closed_form = false;
    if (net.acyclic()) {
      ev.beta_hat = detail::dag_recursion(net, y, spont);
    } else if (y * static_cast<double>(net.max_out_degree()) <= 1.0) {
      ev.beta_hat = detail::greatest_fixed_point(net, y, spont, 1e-12, 1'000'000).beta;
    } else {
      throw PreconditionError("cyclic network with y > 1/Delta: intervention objective unsupported");
    }
  }
  for (double b : ev.beta_hat) ev.objective += b;
  return ev;
}

struct InterventionPlan {
  std::vector<std::uint8_t> protect;   ///< t
  std::size_t budget = 0;              ///< T
  double objective = 0.0;              ///< 1^T beta_hat(t)
  double unprotected_objective = 0.0;  ///< 1^T beta_hat(0)
  std::vector<double> reverse_katz;    ///< gamma_Katz(G^R, y)
  std::vector<NodeId> order;           ///< decreasing reverse Katz, ties by id
  double resilience_lb = 0.0;          ///< at the epsilon passed in
};

/// (eps / gamma_R^T (1 - t))^(1/n); 1 when every product is protected.
inline double post_intervention_resilience_lb(const std::vector<double>& gamma_r,
                                              const std::vector<std::uint8_t>& t, double epsilon,
                                              unsigned n) {
  detail::require_open_unit(epsilon, "epsilon");
  if (n == 0) throw ParameterError("supplier count n must be positive");
  const double denom = detail::unprotected_weight(gamma_r, t);
  if (denom <= 0.0) return 1.0;
  return std::min(1.0, std::pow(epsilon / denom, 1.0 / static_cast<double>(n)));
}

inline double post_intervention_resilience_lb(const InterventionPlan& plan, double epsilon,
                                              unsigned n) {
  return post_intervention_resilience_lb(plan.reverse_katz, plan.protect, epsilon, n);
}

/// Protects the T products with the largest reverse-graph Katz centrality.
inline InterventionPlan optimal_protection(const ProductionNetwork& net, std::size_t budget,
                                           double x, double y, unsigned n, double epsilon = 0.2) {
  if (n == 0) throw ParameterError("supplier count n must be positive");
  if (budget > net.node_count()) throw ParameterError("budget T exceeds K");
  detail::require_protection_conditions(net, x, y, n);
  InterventionPlan plan;
  plan.budget = budget;
  plan.reverse_katz = reverse_katz_centrality(net, y);
  plan.order = decreasing_order(plan.reverse_katz);
  plan.protect.assign(net.node_count(), 0);
  for (std::size_t i = 0; i < budget; ++i) plan.protect[plan.order[i]] = 1;
  const double xn = detail::pow_n(x, n);
  double total = 0.0;
  for (double g : plan.reverse_katz) total += g;
  // 1^T (I - y A^T)^-1 (1 - t) = gamma_R^T (1 - t)
  plan.unprotected_objective = xn * total;
  plan.objective = xn * detail::unprotected_weight(plan.reverse_katz, plan.protect);
  plan.resilience_lb = post_intervention_resilience_lb(plan, epsilon, n);
  return plan;
}

struct InterventionCurvePoint {
  std::size_t budget = 0;
  double fraction = 0.0;        ///< T / K
  double weight = 0.0;          ///< gamma_R^T (1 - t); the objective is x^n times this
  double resilience_lb = 0.0;
};

/// Bound after protecting the top-T reverse-Katz products, T = 0..K. Uses
/// cumulative sums of the sorted centralities.
inline std::vector<InterventionCurvePoint> intervention_curve(const ProductionNetwork& net, double y,
                                                              double epsilon, unsigned n) {
  detail::require_open_unit(epsilon, "epsilon");
  if (n == 0) throw ParameterError("supplier count n must be positive");
  const auto gamma = reverse_katz_centrality(net, y);
  const auto order = decreasing_order(gamma);
  const std::size_t k = net.node_count();
  // suffix sums over the sorted order, so weight(T) is exact rather than a
  // running difference
  std::vector<double> tail(k + 1, 0.0);
  for (std::size_t i = k; i-- > 0;) tail[i] = tail[i + 1] + gamma[order[i]];
  std::vector<InterventionCurvePoint> curve;
  curve.reserve(k + 1);
  for (std::size_t t = 0; t <= k; ++t) {
    InterventionCurvePoint p;
    p.budget = t;
    p.fraction = static_cast<double>(t) / static_cast<double>(k);
    p.weight = tail[t];
    p.resilience_lb =
        p.weight <= 0.0 ? 1.0 : std::min(1.0, std::pow(epsilon / p.weight, 1.0 / static_cast<double>(n)));
    curve.push_back(p);
  }
  return curve;
}

/// Paper's experimental edge survival probability 1/(1e-5 + Delta_R).
inline double default_intervention_y(const ProductionNetwork& net) {
  return 1.0 / (1e-5 + static_cast<double>(net.max_in_degree()));
}

struct SupplierAllocation {
  std::vector<unsigned> extra;   ///< nu
  unsigned budget = 0;           ///< N
  double objective = 0.0;        ///< gamma_R^T x^(nu) (Hadamard power), without the x^n factor
  std::vector<NodeId> order;     ///< decreasing reverse Katz
};

inline double allocation_objective(const std::vector<double>& gamma_r,
                                   const std::vector<unsigned>& nu, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < gamma_r.size(); ++i) s += gamma_r[i] * std::pow(x, static_cast<double>(nu[i]));
  return s;
}

namespace detail {

inline void check_allocation_args(const ProductionNetwork& net, const std::vector<unsigned>& caps,
                                  double x) {
  if (caps.size() != net.node_count()) throw ParameterError("supplier caps must have K entries");
  require_probability(x, "x");
}

}  // namespace detail

/// Prefix fill: walk the decreasing reverse-Katz order and give each product
/// as many extra suppliers as its cap and the remaining budget allow.
inline SupplierAllocation supplier_allocation(const ProductionNetwork& net, double y,
                                              const std::vector<unsigned>& caps, unsigned budget,
                                              double x) {
  detail::check_allocation_args(net, caps, x);
  const auto gamma = reverse_katz_centrality(net, y);
  SupplierAllocation a;
  a.budget = budget;
  a.order = decreasing_order(gamma);
  a.extra.assign(net.node_count(), 0);
  unsigned left = budget;
  for (NodeId v : a.order) {
    const unsigned give = std::min(caps[v], left);
    a.extra[v] = give;
    left -= give;
  }
  a.objective = allocation_objective(gamma, a.extra, x);
  return a;
}

/// Exact minimizer of gamma_R^T x^(nu): the objective is separable with
/// diminishing returns gamma_i x^nu (1 - x), so spending each unit on the
/// largest remaining marginal gain is optimal. Ties go to the earlier
/// product in the reverse-Katz order.
inline SupplierAllocation supplier_allocation_marginal(const ProductionNetwork& net, double y,
                                                       const std::vector<unsigned>& caps,
                                                       unsigned budget, double x) {
  detail::check_allocation_args(net, caps, x);
  const auto gamma = reverse_katz_centrality(net, y);
  SupplierAllocation a;
  a.budget = budget;
  a.order = decreasing_order(gamma);
  a.extra.assign(net.node_count(), 0);
  for (unsigned unit = 0; unit < budget; ++unit) {
    double best_gain = 0.0;
    bool found = false;
    NodeId best = 0;
    for (NodeId v : a.order) {
      if (a.extra[v] >= caps[v]) continue;
      const double gain = gamma[v] * std::pow(x, static_cast<double>(a.extra[v])) * (1.0 - x);
      if (!found || gain > best_gain) {
        best_gain = gain;
        best = v;
        found = true;
      }
    }
    if (!found || best_gain <= 0.0) break;
    ++a.extra[best];
  }
  a.objective = allocation_objective(gamma, a.extra, x);
  return a;
}

}  // namespace supplynet
