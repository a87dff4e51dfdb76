#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "supplynet/generators.hpp"
#include "supplynet/interventions.hpp"

using namespace supplynet;

namespace {

double admissible_y(const ProductionNetwork& net, double frac) {
  const double dmax = static_cast<double>(std::max(net.max_out_degree(), net.max_in_degree()));
  return frac / std::max(1.0, dmax);
}

}  // namespace

TEST(Protection, BudgetExtremes) {
  const auto net = generate_rdag(8, 0.3, 2);
  const double y = admissible_y(net, 0.5);
  const double x = 0.5 * std::pow(1 - 0.5, 1.0);
  const auto none = optimal_protection(net, 0, x, y, 1);
  EXPECT_NEAR(none.objective, none.unprotected_objective, 1e-14);
  EXPECT_NEAR(none.objective, katz_beta(net, x, y, 1).total(), 1e-10);
  const auto all = optimal_protection(net, 8, x, y, 1);
  EXPECT_EQ(all.objective, 0.0);
  EXPECT_EQ(all.resilience_lb, 1.0);
}

TEST(Protection, SingleEdge) {
  const ProductionNetwork edge(2, {{0, 1}});
  const auto plan = optimal_protection(edge, 1, 0.3, 0.25, 1);
  EXPECT_EQ(plan.protect, (std::vector<std::uint8_t>{1, 0}));
  EXPECT_NEAR(plan.reverse_katz[0], 1.25, 1e-12);
  EXPECT_NEAR(plan.reverse_katz[1], 1.0, 1e-12);
  EXPECT_NEAR(plan.objective, oracle::best_protection(edge, 1, 0.3, 0.25, 1), 1e-12);
}

TEST(Protection, PreconditionsNameDegree) {
  const auto star = generate_star(5);  // Delta = 4, Delta_R = 1
  try {
    optimal_protection(star, 1, 0.1, 0.3, 1);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("Delta = 4"), std::string::npos) << e.what();
  }
  const auto rev = reverse_graph(star);  // Delta = 1, Delta_R = 4
  try {
    optimal_protection(rev, 1, 0.1, 0.3, 1);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("Delta_R = 4"), std::string::npos) << e.what();
  }
  EXPECT_THROW(optimal_protection(star, 1, 0.9, 0.2, 1), PreconditionError);
  EXPECT_THROW(optimal_protection(star, 6, 0.1, 0.2, 1), ParameterError);
}

TEST(Protection, ExhaustiveOptimality) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto net = generate_rdag(7, 0.4, s);
    const double y = admissible_y(net, 0.7);
    const double x = 0.5 * std::pow(1 - y * std::max(net.max_out_degree(), net.max_in_degree()), 1.0);
    for (std::size_t t : {1u, 2u, 3u}) {
      const auto plan = optimal_protection(net, t, x, y, 1);
      EXPECT_NEAR(plan.objective, oracle::best_protection(net, t, x, y, 1), 1e-12);
      EXPECT_NEAR(plan.objective, oracle::protection_objective(net, plan.protect, x, y, 1), 1e-12);
    }
  }
}

TEST(Protection, MonotoneInBudget) {
  const auto net = generate_rdag(12, 0.25, 5);
  const double y = admissible_y(net, 0.6);
  double prev_obj = 1e9;
  double prev_lb = 0.0;
  for (std::size_t t = 0; t <= 12; ++t) {
    const auto plan = optimal_protection(net, t, 0.05, y, 1);
    EXPECT_LE(plan.objective, prev_obj + 1e-15);
    EXPECT_GE(plan.resilience_lb, prev_lb);
    EXPECT_LE(plan.objective, plan.unprotected_objective + 1e-15);
    prev_obj = plan.objective;
    prev_lb = plan.resilience_lb;
  }
}

TEST(Evaluate, ClosedFormCases) {
  const auto net = generate_chain(3);
  const std::vector<std::uint8_t> all(3, 1);
  for (double b : evaluate_intervention(net, all, 0.2, 0.25, 1).beta_hat) EXPECT_EQ(b, 0.0);
  const auto zero = evaluate_intervention(net, std::vector<std::uint8_t>(3, 0), 0.2, 0.25, 1);
  const auto kb = katz_beta(net, 0.2, 0.25, 1);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(zero.beta_hat[i], kb.beta[i], 1e-14);
  // protect the middle node: (0.2, 0.25*0.2, 0.25*0.05 + 0.2)
  const auto mid = evaluate_intervention(net, {0, 1, 0}, 0.2, 0.25, 1);
  EXPECT_TRUE(mid.closed_form);
  EXPECT_NEAR(mid.beta_hat[0], 0.2, 1e-14);
  EXPECT_NEAR(mid.beta_hat[1], 0.05, 1e-14);
  EXPECT_NEAR(mid.beta_hat[2], 0.2125, 1e-14);
}

TEST(Evaluate, FallsBackOutsidePreconditions) {
  const auto net = generate_chain(3);
  const auto ev = evaluate_intervention(net, {1, 0, 0}, 0.9, 0.9, 1);
  EXPECT_FALSE(ev.closed_form);
  EXPECT_NEAR(ev.beta_hat[0], 0.0, 1e-15);
  EXPECT_NEAR(ev.beta_hat[1], 0.9, 1e-15);
  EXPECT_NEAR(ev.beta_hat[2], 1.0, 1e-15);
}

TEST(PostIntervention, MatchesCumulativeSums) {
  const auto net = generate_rdag(30, 0.1, 8);
  const double y = default_intervention_y(net);
  const auto curve = intervention_curve(net, y, 0.2, 1);
  ASSERT_EQ(curve.size(), 31u);
  const auto gamma = oracle::dense_katz(net, y, true);
  std::vector<double> sorted = gamma;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (std::size_t t = 0; t <= 30; ++t) {
    double rest = 0.0;
    for (std::size_t i = t; i < 30; ++i) rest += sorted[i];
    EXPECT_NEAR(curve[t].weight, rest, 1e-9 * std::max(1.0, rest));
    const double lb = rest <= 0 ? 1.0 : std::min(1.0, 0.2 / rest);
    EXPECT_NEAR(curve[t].resilience_lb, lb, 1e-9);
    if (t > 0) {
      EXPECT_GE(curve[t].resilience_lb, curve[t - 1].resilience_lb);
    }
  }
  EXPECT_EQ(curve.back().resilience_lb, 1.0);
}

TEST(PostIntervention, ZeroBudgetUsesReverseTotal) {
  const auto net = generate_rdag(10, 0.3, 3);
  const double y = admissible_y(net, 0.5);
  const auto plan = optimal_protection(net, 0, 0.05, y, 1);
  const auto fwd = resilience_lb_katz(net, y, 0.3, 1);
  EXPECT_NEAR(post_intervention_resilience_lb(plan, 0.3, 1), fwd.x, 1e-10);
  double rev_total = 0.0;
  for (double g : plan.reverse_katz) rev_total += g;
  EXPECT_NEAR(rev_total, fwd.katz_total, 1e-9);
}

TEST(ReverseKatz, MatchesDenseInverseAndTransposeTotal) {
  const ProductionNetwork cyc(4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}});
  const double y = 0.4;
  const auto g = reverse_katz_centrality(cyc, y);
  const auto ref = oracle::dense_katz(cyc, y, true);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(g[i], ref[i], 1e-10);
  const ProductionNetwork fan_in(3, {{0, 1}, {1, 0}, {2, 1}});  // Delta_R = 2 on a cycle
  EXPECT_THROW(reverse_katz_centrality(fan_in, 0.6), PreconditionError);
  // DAG: any y
  EXPECT_NO_THROW(reverse_katz_centrality(generate_star(6), 0.99));
}

TEST(Allocation, Trivial) {
  const auto net = generate_chain(4);
  const std::vector<unsigned> caps(4, 2);
  EXPECT_EQ(supplier_allocation(net, 0.2, caps, 0, 0.5).extra, (std::vector<unsigned>(4, 0)));
  EXPECT_EQ(supplier_allocation(net, 0.2, caps, 20, 0.5).extra, caps);
}

TEST(Allocation, PrefixFillTrace) {
  const auto net = generate_chain(4);
  const std::vector<unsigned> caps(4, 2);
  const auto a = supplier_allocation(net, 0.2, caps, 3, 0.5);
  EXPECT_EQ(a.order, (std::vector<NodeId>{0, 1, 2, 3}));
  EXPECT_EQ(a.extra, (std::vector<unsigned>{2, 1, 0, 0}));
  // the prefix rule is not the minimizer here: (1,1,1,0) is strictly better
  const auto gamma = reverse_katz_centrality(net, 0.2);
  EXPECT_GT(a.objective, allocation_objective(gamma, {1, 1, 1, 0}, 0.5));
}

TEST(Allocation, PrefixStructure) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto net = generate_rdag(8, 0.3, s);
    const std::vector<unsigned> caps{1, 2, 3, 1, 2, 3, 1, 2};
    const auto a = supplier_allocation(net, 0.1, caps, 7, 0.4);
    unsigned total = 0;
    int partial = 0;
    bool ended = false;
    for (NodeId v : a.order) {
      total += a.extra[v];
      if (ended) {
        EXPECT_EQ(a.extra[v], 0u);
      }
      if (a.extra[v] < caps[v]) {
        if (a.extra[v] > 0) ++partial;
        ended = true;
      }
    }
    EXPECT_LE(total, 7u);
    EXPECT_LE(partial, 1);
  }
}

TEST(Allocation, MarginalGreedyIsExhaustivelyOptimal) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto net = generate_rdag(6, 0.4, s);
    const std::vector<unsigned> caps{2, 2, 2, 2, 2, 2};
    const double y = 0.3;
    const auto gamma = reverse_katz_centrality(net, y);
    for (unsigned budget : {0u, 3u, 5u, 12u}) {
      const auto a = supplier_allocation_marginal(net, y, caps, budget, 0.5);
      EXPECT_NEAR(a.objective, oracle::best_allocation(gamma, caps, budget, 0.5), 1e-12);
    }
  }
}
