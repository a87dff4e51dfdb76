// Tour of the library on small generated networks: simulate a cascade,
// estimate resilience, compare with analytic bounds, rank vulnerable
// products and plan a protection budget.

#include <cstdio>

#include "supplynet.hpp"

int main() {
  using namespace supplynet;

  const auto net = generate_rdag(30, 0.1, 7);
  std::printf("rdag(30, 0.1): %zu edges, max out-degree %zu\n", net.edge_count(),
              net.max_out_degree());

  const auto batch = run_batch(net, PercolationConfig{0.05, 1.0, 1, 11}, 2000);
  std::printf("x = 0.05: mean failed products %.3f\n", batch.mean_failed());

  const auto curve = resilience_curve(net, {0.1, 0.3, 0.5}, 1, 1000, 0.01, 3);
  for (std::size_t i = 0; i < curve.epsilon.size(); ++i) {
    std::printf("  R(%.1f) ~ %.4f\n", curve.epsilon[i], curve.r_hat[i]);
  }
  std::printf("  AUC %.4f\n", curve.auc);

  const double lb = rdag_lb_x(30, 0.1, 0.3, 1);
  std::printf("rdag lower bound at eps = 0.3: %.4f\n", lb);
  std::printf("any-DAG lower bound at eps = 0.3: %.4f\n", dag_resilience_lb(30, 0.3, 1));

  const auto tree = tree_bounds(2, 5, 0.3, 1);
  std::printf("binary tree D=5 (%.0f products): [%.4f, %.4f]\n", tree.node_count,
              tree.bounds.lower.value_or(0.0), tree.bounds.upper.value_or(1.0));

  const auto g = gw_bounds(BranchingDistribution::poisson(0.5).mean(), 5, 0.3, 1);
  std::printf("GW mu=0.5 tau=5: [%.4f, %.4f]\n", g.lower.x, g.upper.x);

  const double y = 1.0 / (2.0 * static_cast<double>(net.max_out_degree()));
  const auto ranking = vulnerability_ranking(net, 0.05, y, 1);
  std::printf("most vulnerable product: %zu (beta %.4f)\n", static_cast<std::size_t>(ranking.front().node) + 1,
              ranking.front().beta);

  const double yr = 1.0 / (2.0 * static_cast<double>(std::max(net.max_out_degree(), net.max_in_degree())));
  const auto plan = optimal_protection(net, 3, 0.05, yr, 1);
  std::printf("protecting 3 products: objective %.4f -> %.4f\n", plan.unprotected_objective,
              plan.objective);
  return 0;
}
