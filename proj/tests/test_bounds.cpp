#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "supplynet/bounds.hpp"
#include "supplynet/generators.hpp"

using namespace supplynet;

TEST(PowerLaw, Limits) {
  for (std::size_t f : {1u, 5u, 50u}) {
    EXPECT_DOUBLE_EQ(powerlaw_pmf(f, 100, 0.3, 1.0, 2), 0.01);
    EXPECT_DOUBLE_EQ(powerlaw_pmf(f, 100, 0.0, 0.2, 1), 0.01);
    EXPECT_DOUBLE_EQ(powerlaw_pmf(f, 100, 0.3, 0.0, 1), 0.0);
  }
  EXPECT_NEAR(powerlaw_pmf(1000, 1000, 0.1, 0.2, 1), 0.2 / 1000, 1e-15);
  EXPECT_DOUBLE_EQ(powerlaw_pmf(3, 10, 1.0, 0.5, 1), 0.05);
  EXPECT_THROW(powerlaw_pmf(0, 10, 0.5, 0.5, 1), ParameterError);
  EXPECT_THROW(powerlaw_pmf(11, 10, 0.5, 0.5, 1), ParameterError);
}

TEST(PowerLaw, TailDominatesHarmonicTail) {
  for (double p : {0.01, 0.05, 0.3}) {
    for (double x : {0.05, 0.2, 0.6}) {
      const std::size_t k = 500;
      const double c = powerlaw_tail_constant(k, p, x, 1);
      for (std::size_t f0 : {1u, 10u, 100u}) {
        double tail = 0.0;
        double harmonic = 0.0;
        for (std::size_t f = f0; f <= k; ++f) {
          tail += powerlaw_pmf(f, k, p, x, 1);
          harmonic += 1.0 / static_cast<double>(f);
        }
        EXPECT_GE(tail, c * harmonic) << p << " " << x << " " << f0;
      }
    }
  }
}

TEST(CascadeTail, Limits) {
  EXPECT_DOUBLE_EQ(cascade_tail_g(0.0, 100, 0.1, 0.3, 1), 0.0);
  EXPECT_NEAR(cascade_tail_g(0.2, 10'000'000, 0.1, 0.3, 1), 0.2 * 0.7, 1e-6);
  EXPECT_NEAR(cascade_tail_g(0.5, 10'000'000, 0.1, 0.3, 2), 0.25 * 0.7, 1e-6);
  EXPECT_THROW(cascade_tail_g(0.2, 100, 0.0, 0.3, 1), ParameterError);
  EXPECT_THROW(cascade_tail_g(0.2, 100, 1.0, 0.3, 1), ParameterError);
}

TEST(CascadeTail, MatchesArbitraryPrecision) {
  EXPECT_NEAR(cascade_tail_g(0.2, 1000, 0.1, 0.3, 1), oracle::cascade_tail_mp(0.2, 1000, 0.1, 0.3, 1),
              1e-13);
  for (double p : {1e-4, 0.01, 0.5, 0.99}) {
    for (std::size_t k : {10u, 1000u, 100000u}) {
      const double g = cascade_tail_g(0.3, k, p, 0.4, 2);
      const double ref = oracle::cascade_tail_mp(0.3, k, p, 0.4, 2);
      EXPECT_NEAR(g, ref, 1e-12 * std::max(1.0, std::abs(ref))) << p << " " << k;
    }
  }
}

TEST(CascadeTail, RelaxationDominates) {
  for (double x : {0.05, 0.2, 0.5}) {
    EXPECT_GE(cascade_tail_gbar(x, 200, 0.05, 0.3, 1), cascade_tail_g(x, 200, 0.05, 0.3, 1));
  }
}

TEST(RdagLowerBound, Substitution) {
  const double p = 1.0 - std::exp(-1.0);
  EXPECT_NEAR(rdag_lb_x(100, p, 0.5, 1), 0.02, 1e-12);
  EXPECT_GT(rdag_lb_x(100, p, 0.5, 200), 0.98);
  for (double eps : {0.1, 0.5, 0.9}) {
    const double x = rdag_lb_x(1000, 0.01, eps, 1);
    const double lam = -std::log1p(-0.01);
    EXPECT_LE(cascade_tail_gbar(x, 1000, 0.01, eps, 1), 2.0 / (1000 * lam) * (1 + 1e-12));
  }
}

TEST(Parallel, Examples) {
  const auto c = parallel_bounds(50, 1, 3, 0.5, 1, ParallelScope::kComplexOnly);
  EXPECT_NEAR(*c.upper, 0.75, 1e-12);
  const auto c2 = parallel_bounds(50, 1, 3, 0.5, 2, ParallelScope::kComplexOnly);
  EXPECT_NEAR(*c2.upper, std::sqrt(0.75), 1e-12);

  const auto big = parallel_bounds(std::size_t{1} << 40, 2, 4, 0.3, 1, ParallelScope::kComplexOnly);
  EXPECT_NEAR(*big.lower, 0.3 / 8, 1e-5);

  const double k = 1000;
  const auto tiny = parallel_bounds(1000, 2, 4, 1e-12, 1, ParallelScope::kComplexOnly);
  EXPECT_NEAR(*tiny.lower, std::sqrt(std::log(k) / (4 * k)), 1e-9);

  const auto all = parallel_bounds(1000, 2, 4, 0.3, 1, ParallelScope::kAllProducts);
  EXPECT_NEAR(*all.lower, 0.3 / (2 * 5 * 2) + std::sqrt(std::log(500.0) / (4 * k)), 1e-12);
  EXPECT_NEAR(*all.upper, 1 - 0.7 / 6, 1e-12);
  EXPECT_THROW(parallel_bounds(2, 1, 1, 0.5, 1, ParallelScope::kComplexOnly), ParameterError);
}

TEST(Tree, SurvivalExamples) {
  EXPECT_NEAR(tree_survival_q(1, 3, 3, 0.1, 1), 0.9, 1e-15);
  EXPECT_NEAR(tree_survival_q(2, 2, 1, 0.2, 1), 0.512, 1e-15);
  // 3-node tree brute force: root works iff all three products have suppliers
  const auto net = generate_backward_tree(2, 2);
  const auto law = oracle::enumerate_suppliers(net, 0.2, 1.0, 1);
  EXPECT_NEAR(1.0 - law.node_failure[0], 0.512, 1e-12);
}

TEST(Tree, RecurrenceHolds) {
  for (unsigned m : {1u, 2u, 3u}) {
    for (unsigned n : {1u, 2u}) {
      const unsigned depth = 6;
      for (unsigned d = 1; d <= depth; ++d) {
        const double lhs = tree_survival_q(m, depth, d, 0.15, n);
        const double rhs = std::pow(tree_survival_q(m, depth, d + 1, 0.15, n), m) *
                           (1.0 - std::pow(0.15, n));
        EXPECT_NEAR(lhs, rhs, 1e-14);
      }
    }
  }
}

TEST(Tree, SurvivalMatchesEnumerationPerTier) {
  const auto net = generate_backward_tree(2, 4);
  const auto law = oracle::enumerate_products(net, 0.2, 1.0, 1);
  const auto& tiers = *net.tiers();
  for (NodeId v = 0; v < net.node_count(); ++v) {
    EXPECT_NEAR(1.0 - law.node_failure[v], tree_survival_q(2, 4, tiers[v], 0.2, 1), 1e-12);
  }
  const auto es = tree_expected_survivors(2, 4, 0.2, 1);
  EXPECT_NEAR(es.exact, 15.0 - law.expected_failed, 1e-12);
  EXPECT_LE(es.lower, es.exact);
}

TEST(Tree, CatastropheEnvelope) {
  const unsigned m = 2;
  const unsigned depth = 10;
  const double k = tree_size(m, depth);
  const double xn = m * std::log(k) / k;
  const double exact = tree_catastrophe_probability(m, depth, xn, 1);
  const double env = tree_catastrophe_envelope(m, depth, xn, 1);
  EXPECT_GE(exact, env);
  EXPECT_GE(env, 1.0 - 1.0 / k);
  for (double x : {0.001, 0.01, 0.1}) {
    EXPECT_GE(tree_catastrophe_probability(3, 5, x, 1), tree_catastrophe_envelope(3, 5, x, 1));
  }
}

TEST(Tree, BoundsShape) {
  const auto chain = tree_bounds(1, 10, 0.5, 1);
  EXPECT_EQ(chain.bounds.regime, "chain");
  EXPECT_NEAR(*chain.bounds.upper, 2.0 / (0.5 * 10), 1e-12);
  const auto t = tree_bounds(2, 4, 0.3, 1);
  EXPECT_EQ(t.node_count, 15.0);
  EXPECT_NEAR(*t.bounds.lower, 1 - std::pow(1 - 1.0 / 15, 1 / (0.7 * 15)), 1e-12);
  EXPECT_NEAR(*t.bounds.upper, 0.7 * std::log(2.0) / std::log(15.0), 1e-12);
}

TEST(Tree, LowerBoundIsConservativeByEnumeration) {
  const auto net = generate_backward_tree(2, 4);
  for (double eps : {0.2, 0.5}) {
    const double x = *tree_bounds(2, 4, eps, 1).bounds.lower;
    const auto law = oracle::enumerate_products(net, x, 1.0, 1);
    const std::size_t s = static_cast<std::size_t>(std::ceil((1 - eps) * 15 - 1e-9));
    EXPECT_LE(1.0 - law.survival_at_least(s), 3.0 / 15.0);
  }
}

TEST(GwExtinction, KnownValues) {
  EXPECT_EQ(gw_extinction(BranchingDistribution::poisson(0.7)), 1.0);
  EXPECT_EQ(gw_extinction(BranchingDistribution::binomial(10, 0.05)), 1.0);
  EXPECT_EQ(gw_extinction(BranchingDistribution::point_mass(2)), 0.0);
  const double eta = gw_extinction(BranchingDistribution::poisson(2.0));
  EXPECT_NEAR(eta, 0.2032, 1e-3);
  EXPECT_NEAR(eta, std::exp(2.0 * (eta - 1.0)), 1e-9);
  const auto b = BranchingDistribution::binomial(2, 0.75);  // G(s) = (0.25 + 0.75 s)^2
  EXPECT_NEAR(gw_extinction(b), 1.0 / 9.0, 1e-9);
}

TEST(GwBounds, SubcriticalRootsExist) {
  for (double mu : {0.1, 0.5, 0.9}) {
    for (unsigned tau : {1u, 3u, 20u}) {
      const auto b = gw_bounds(mu, tau, 0.3, 1);
      EXPECT_TRUE(b.upper.feasible);
      EXPECT_GT(b.upper.x, 0.0);
      EXPECT_LT(b.upper.x, 1.0);
      EXPECT_GT(b.lower.x, 0.0);
    }
  }
}

TEST(GwBounds, LowerMatchesDenseScan) {
  const auto r = gw_lower_x(0.5, 2, 0.3, 1);
  const auto scan = oracle::gw_scan(0.5L, 2, 0.3L, 1, 1'000'000);
  EXPECT_NEAR(r.x, static_cast<double>(scan.lower), 1e-6);
}

TEST(GwBounds, ResidualAroundRoot) {
  const double tol = 1e-10;
  for (double mu : {0.3, 0.8, 12.0}) {
    for (unsigned tau : {1u, 4u, 9u}) {
      const auto lo = gw_lower_x(mu, tau, 0.25, 1);
      EXPECT_TRUE(gw_lower_condition(mu, tau, 0.25, 1, lo.x));
      if (lo.x + 10 * tol < detail::gw_x_cap(mu, 1)) {
        EXPECT_FALSE(gw_lower_condition(mu, tau, 0.25, 1, lo.x + 10 * tol));
      }
      const auto up = gw_upper_x(mu, tau, 0.25, 1);
      if (up.feasible && up.x > 0.0) {
        EXPECT_TRUE(gw_upper_condition(mu, tau, 0.25, 1, up.x));
        EXPECT_FALSE(gw_upper_condition(mu, tau, 0.25, 1, up.x - 10 * tol));
      }
    }
  }
}

TEST(GwBounds, UnsupportedGapsThrow) {
  EXPECT_THROW(gw_upper_x(2.0, 3, 0.3, 1), PreconditionError);
  EXPECT_THROW(gw_upper_x(7.0, 3, 0.3, 1), PreconditionError);
  EXPECT_THROW(gw_lower_x(2.5, 3, 0.3, 1), PreconditionError);
  EXPECT_NO_THROW(gw_lower_x(3.0, 3, 0.3, 1));
  EXPECT_THROW(gw_expected_bounds(2.0, extinction_law_exact(BranchingDistribution::poisson(2.0), 50),
                                  0.3, 1),
               PreconditionError);
}

TEST(GwBounds, ExpectedBoundsDecreaseAcrossSubcriticalSweep) {
  double prev_up = 2.0;
  double prev_lo = 2.0;
  for (double p = 0.01; p < 0.1; p += 0.01) {
    const auto dist = BranchingDistribution::binomial(10, p);
    const auto e = gw_expected_bounds(dist.mean(), extinction_law_exact(dist, 1000), 0.3, 1);
    EXPECT_LE(*e.upper, prev_up + 1e-12);
    EXPECT_LE(*e.lower, prev_lo + 1e-12);
    prev_up = *e.upper;
    prev_lo = *e.lower;
  }
}

TEST(ExtinctionLaw, SimulatedMatchesExact) {
  const auto dist = BranchingDistribution::poisson(0.8);
  const auto exact = extinction_law_exact(dist, 200);
  const auto sim = extinction_law_simulated(dist, 20000, 200, 3);
  EXPECT_NEAR(sim.extinct_mass, 1.0, 1e-12);
  for (unsigned k = 1; k <= 5; ++k) {
    const double p = exact.prob[k];
    EXPECT_NEAR(sim.prob[k], p, 4.0 * std::sqrt(p * (1 - p) / 20000.0));
  }
}

TEST(ExtinctionLaw, PointMassTwoNeverDies) {
  const auto s = simulate_extinction(BranchingDistribution::point_mass(2), 100, 1000, 1);
  EXPECT_EQ(s.extinct, 0u);
}

TEST(Trellis, Regimes) {
  const auto hi = trellis_bounds(2, 10, 0.75, 0.2, 1);
  EXPECT_EQ(hi.regime, "pw>1");
  EXPECT_NEAR(*hi.lower, 0.2 * 2 * 0.5 / (20 * std::pow(1.5, 10)), 1e-15);
  EXPECT_NEAR(*hi.upper, 1.2 * 2 / 20, 1e-12);

  const auto crit = trellis_bounds(2, 10, 0.5, 0.2, 1);
  EXPECT_EQ(crit.regime, "pw=1");
  EXPECT_NEAR(*crit.lower, 0.2 / 100, 1e-15);

  const auto low = trellis_bounds(1, 50, 0.5, 0.999999, 1);
  EXPECT_EQ(low.regime, "pw<1");
  EXPECT_NEAR(*low.upper, 0.5, 1e-6);
  // chain-like trellis: lower bound vanishes with depth
  EXPECT_LT(*trellis_bounds(1, 1000, 0.9, 0.3, 1).lower, 1e-6);
}

TEST(Trellis, HugeDepthStaysFinite) {
  const auto b = trellis_bounds(4, 5000, 0.9, 0.3, 2);
  EXPECT_EQ(*b.lower, 0.0);
  EXPECT_FALSE(std::isnan(*b.upper));
}
