#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "supplynet/errors.hpp"
#include "supplynet/network.hpp"

namespace supplynet {

enum class BetaMethod { kDagLinear, kFixedPoint, kKatz };

inline std::string to_string(BetaMethod m) {
  switch (m) {
    case BetaMethod::kDagLinear: return "dag-linear";
    case BetaMethod::kFixedPoint: return "fixed-point";
    case BetaMethod::kKatz: return "katz-closed-form";
  }
  return "?";
}

/// Per-product upper bounds on failure probabilities.
struct BetaVector {
  std::vector<double> beta;
  BetaMethod method = BetaMethod::kDagLinear;
  std::size_t iterations = 0;
  double residual = 0.0;
  /// Set when the fixed point was computed with y > 1/Delta on request; the
  /// vector is then not guaranteed to solve the LP.
  bool precondition_overridden = false;
  /// False for a Katz vector outside x < (1 - y Delta)^(1/n), or with an
  /// entry above 1 (possible inside that range at nodes with many inputs,
  /// since Delta counts outputs). It is then still an upper bound on E[F]
  /// but may exceed the LP optimum.
  bool equals_lp = true;

  double total() const {
    double s = 0.0;
    for (double b : beta) s += b;
    return s;
  }
};

namespace detail {

inline void check_beta_args(double x, double y, unsigned n) {
  require_probability(x, "x");
  require_probability(y, "y");
  if (n == 0) throw ParameterError("supplier count n must be positive");
}

inline double pow_n(double x, unsigned n) { return std::pow(x, static_cast<double>(n)); }

/// Algorithm-1 recursion with a per-node spontaneous term.
inline std::vector<double> dag_recursion(const ProductionNetwork& net, double y,
                                         const std::vector<double>& spont) {
  const auto order = topological_order(net);
  std::vector<double> beta(net.node_count(), 0.0);
  for (NodeId v : order) {
    double s = 0.0;
    for (NodeId u : net.inputs(v)) s += beta[u];
    beta[v] = std::min(1.0, y * s + spont[v]);
  }
  return beta;
}

/// Iterates Phi(b) = min(1, y A^T b + spont) from the all-ones vector.
inline BetaVector greatest_fixed_point(const ProductionNetwork& net, double y,
                                       const std::vector<double>& spont, double tol,
                                       std::size_t max_iter) {
  const std::size_t k = net.node_count();
  BetaVector out;
  out.method = BetaMethod::kFixedPoint;
  std::vector<double> cur(k, 1.0);
  std::vector<double> next(k);
  double change = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    change = 0.0;
    for (NodeId v = 0; v < k; ++v) {
      double s = 0.0;
      for (NodeId u : net.inputs(v)) s += cur[u];
      next[v] = std::min(1.0, y * s + spont[v]);
      change = std::max(change, std::abs(next[v] - cur[v]));
    }
    cur.swap(next);
    if (change < tol) {
      out.beta = std::move(cur);
      out.iterations = it;
      out.residual = change;
      return out;
    }
  }
  throw ConvergenceError("fixed-point iteration did not converge", change, max_iter);
}

/// Solves v = b + y A^T v, i.e. v_i = b_i + y * sum of v over the inputs of i.
/// Neumann iteration first; dense LU for K <= 2000 if that stalls.
inline std::vector<double> katz_solve(const ProductionNetwork& net, double y,
                                      const std::vector<double>& b, double tol = 1e-12,
                                      std::size_t max_iter = 100'000) {
  const std::size_t k = net.node_count();
  std::vector<double> cur = b;
  std::vector<double> next(k);
  double change = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    change = 0.0;
    double scale = 1.0;
    for (NodeId v = 0; v < k; ++v) {
      double s = 0.0;
      for (NodeId u : net.inputs(v)) s += cur[u];
      next[v] = b[v] + y * s;
      change = std::max(change, std::abs(next[v] - cur[v]));
      scale = std::max(scale, std::abs(next[v]));
    }
    cur.swap(next);
    if (change <= tol * scale) return cur;
  }
  if (k <= 2000) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (const auto& e : net.edges()) m(e.to, e.from) -= y;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) rhs(static_cast<Eigen::Index>(i)) = b[i];
    const Eigen::VectorXd sol = m.partialPivLu().solve(rhs);
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = sol(static_cast<Eigen::Index>(i));
    return out;
  }
  throw ConvergenceError("Katz series did not converge", change, max_iter);
}

inline void require_katz_condition(const ProductionNetwork& net, double y) {
  const auto delta = static_cast<double>(net.max_out_degree());
  if (!(y * delta < 1.0)) {
    throw PreconditionError("Katz centrality requires y < 1/Delta = 1/" +
                            std::to_string(net.max_out_degree()));
  }
}

}  // namespace detail

/// Exact LP optimum on a DAG in O(K + |E|).
inline BetaVector dag_beta(const ProductionNetwork& net, double x, double y, unsigned n) {
  detail::check_beta_args(x, y, n);
  BetaVector out;
  out.method = BetaMethod::kDagLinear;
  out.beta = detail::dag_recursion(net, y, std::vector<double>(net.node_count(), detail::pow_n(x, n)));
  return out;
}

/// Greatest fixed point of Phi(b) = min(1, y A^T b + x^n). Requires
/// y <= 1/Delta unless `allow_override` is set, in which case the result is
/// flagged.
inline BetaVector fixed_point_beta(const ProductionNetwork& net, double x, double y, unsigned n,
                                   double tol = 1e-12, std::size_t max_iter = 1'000'000,
                                   bool allow_override = false) {
  detail::check_beta_args(x, y, n);
  const auto delta = static_cast<double>(net.max_out_degree());
  const bool ok = y * delta <= 1.0;
  if (!ok && !allow_override) {
    throw PreconditionError("fixed point equals the LP only for y <= 1/Delta = 1/" +
                            std::to_string(net.max_out_degree()));
  }
  auto out = detail::greatest_fixed_point(
      net, y, std::vector<double>(net.node_count(), detail::pow_n(x, n)), tol, max_iter);
  out.precondition_overridden = !ok;
  return out;
}

/// gamma = (I - y A^T)^-1 1: weighted count of walks ending at each node.
inline std::vector<double> katz_centrality(const ProductionNetwork& net, double y) {
  detail::require_probability(y, "y");
  detail::require_katz_condition(net, y);
  return detail::katz_solve(net, y, std::vector<double>(net.node_count(), 1.0));
}

/// Largest x for which the Katz vector is the LP optimum: (1 - y Delta)^(1/n).
inline double katz_x_threshold(const ProductionNetwork& net, double y, unsigned n) {
  const double slack = 1.0 - y * static_cast<double>(net.max_out_degree());
  return slack <= 0.0 ? 0.0 : std::pow(slack, 1.0 / static_cast<double>(n));
}

inline BetaVector katz_beta(const ProductionNetwork& net, double x, double y, unsigned n) {
  detail::check_beta_args(x, y, n);
  auto gamma = katz_centrality(net, y);
  const double xn = detail::pow_n(x, n);
  for (auto& g : gamma) g *= xn;
  BetaVector out;
  out.method = BetaMethod::kKatz;
  const bool bounded = std::all_of(gamma.begin(), gamma.end(), [](double b) { return b <= 1.0; });
  out.beta = std::move(gamma);
  out.equals_lp = bounded && x < katz_x_threshold(net, y, n);
  return out;
}

/// Picks Algorithm 1 on DAGs and the fixed point otherwise.
inline BetaVector compute_beta(const ProductionNetwork& net, double x, double y, unsigned n) {
  if (net.acyclic()) return dag_beta(net, x, y, n);
  detail::check_beta_args(x, y, n);
  if (y * static_cast<double>(net.max_out_degree()) > 1.0) {
    throw PreconditionError("cyclic network with y > 1/Delta: the LP is not supported");
  }
  return fixed_point_beta(net, x, y, n);
}

struct KatzResilienceBound {
  double x = 0.0;
  double katz_total = 0.0;
  bool clamped = false;
  /// Whether the returned x also satisfies x < (1 - y Delta)^(1/n).
  bool x_precondition_holds = false;
};

/// (eps / 1^T gamma)^(1/n).
inline KatzResilienceBound resilience_lb_katz(const ProductionNetwork& net, double y,
                                              double epsilon, unsigned n) {
  detail::require_open_unit(epsilon, "epsilon");
  if (n == 0) throw ParameterError("supplier count n must be positive");
  const auto gamma = katz_centrality(net, y);
  KatzResilienceBound r;
  for (double g : gamma) r.katz_total += g;
  double x = std::pow(epsilon / r.katz_total, 1.0 / static_cast<double>(n));
  if (x > 1.0) {
    x = 1.0;
    r.clamped = true;
  }
  r.x = x;
  r.x_precondition_holds = x < katz_x_threshold(net, y, n);
  return r;
}

/// E[F] <= x^n e^(K y) / y on any DAG with K nodes.
inline double dag_sparse_bound(std::size_t k, double x, double y, unsigned n) {
  detail::require_positive(static_cast<long long>(k), "K");
  detail::require_probability(x, "x");
  detail::require_open_unit(y, "y");
  return detail::pow_n(x, n) * std::exp(static_cast<double>(k) * y) / y;
}

/// (eps y / e^(K y))^(1/n), the resilience bound implied by dag_sparse_bound.
inline double dag_resilience_lb_at(std::size_t k, double epsilon, double y, unsigned n) {
  detail::require_open_unit(epsilon, "epsilon");
  detail::require_open_unit(y, "y");
  const double log_t = std::log(epsilon * y) - static_cast<double>(k) * y;
  return std::min(1.0, std::exp(log_t / static_cast<double>(n)));
}

/// Best case y = 1/K: (eps / (e K))^(1/n).
inline double dag_resilience_lb(std::size_t k, double epsilon, unsigned n) {
  detail::require_positive(static_cast<long long>(k), "K");
  detail::require_open_unit(epsilon, "epsilon");
  if (n == 0) throw ParameterError("supplier count n must be positive");
  return std::min(1.0, std::pow(epsilon / (std::numbers::e * static_cast<double>(k)),
                                1.0 / static_cast<double>(n)));
}

struct RankedProduct {
  NodeId node;
  double beta;
};

/// Products by decreasing beta, ties by ascending id.
inline std::vector<RankedProduct> rank_by_beta(const std::vector<double>& beta) {
  std::vector<RankedProduct> r;
  r.reserve(beta.size());
  for (NodeId v = 0; v < beta.size(); ++v) r.push_back({v, beta[v]});
  std::stable_sort(r.begin(), r.end(),
                   [](const RankedProduct& a, const RankedProduct& b) { return a.beta > b.beta; });
  return r;
}

inline std::vector<RankedProduct> vulnerability_ranking(const ProductionNetwork& net, double x,
                                                        double y, unsigned n) {
  return rank_by_beta(compute_beta(net, x, y, n).beta);
}

}  // namespace supplynet
