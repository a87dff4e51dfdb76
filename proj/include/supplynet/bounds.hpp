#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "supplynet/branching.hpp"
#include "supplynet/errors.hpp"
#include "supplynet/random.hpp"

namespace supplynet {

/// A resilience interval from one architecture result. Lower and upper come
/// from different arguments, so they may cross at small sizes; crossed()
/// reports it rather than hiding it.
struct BoundResult {
  std::optional<double> lower;
  std::optional<double> upper;
  std::string regime;
  bool lower_clamped = false;
  bool upper_clamped = false;

  bool crossed() const { return lower && upper && *lower > *upper; }
};

namespace detail {

struct Clamped {
  double value;
  bool clamped;
};

inline Clamped clamp_unit(double v) {
  if (std::isnan(v)) return {0.0, true};
  if (v < 0.0) return {0.0, true};
  if (v > 1.0) return {1.0, true};
  return {v, false};
}

/// t^(1/n) for the spontaneous-rate to supplier-rate conversion, clamped.
inline Clamped root_n(double t, unsigned n) {
  if (n == 0) throw ParameterError("supplier count n must be positive");
  if (t <= 0.0) return {0.0, t < 0.0};
  return clamp_unit(std::pow(t, 1.0 / static_cast<double>(n)));
}

/// Same, from log t, so huge or tiny t never overflow.
inline Clamped root_n_log(double log_t, unsigned n) {
  if (n == 0) throw ParameterError("supplier count n must be positive");
  return clamp_unit(std::exp(log_t / static_cast<double>(n)));
}

inline double spontaneous_rate(double x, unsigned n) {
  return std::pow(x, static_cast<double>(n));
}

inline double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

inline void set_lower(BoundResult& r, Clamped c) {
  r.lower = c.value;
  r.lower_clamped = c.clamped;
}

inline void set_upper(BoundResult& r, Clamped c) {
  r.upper = c.value;
  r.upper_clamped = c.clamped;
}

inline void require_open_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError(std::string(name) + " must lie strictly between 0 and 1");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random DAG

/// Asymptotic cascade-size law on rdag(K, p):
/// x^n / (K (1 - (1 - x^n)(1 - p)^f)).
inline double powerlaw_pmf(std::size_t f, std::size_t k, double p, double x, unsigned n) {
  detail::require_positive(static_cast<long long>(k), "K");
  detail::require_probability(p, "p");
  detail::require_probability(x, "x");
  if (f < 1 || f > k) throw ParameterError("cascade size f must lie in [1, K]");
  const double xn = detail::spontaneous_rate(x, n);
  if (xn == 0.0) return 0.0;
  const double decay = (p == 1.0) ? 0.0 : std::exp(static_cast<double>(f) * std::log1p(-p));
  return xn / (static_cast<double>(k) * (1.0 - (1.0 - xn) * decay));
}

/// Constant C(K, p, x, n) of the 1/f tail lower bound.
inline double powerlaw_tail_constant(std::size_t k, double p, double x, unsigned n) {
  detail::require_positive(static_cast<long long>(k), "K");
  detail::require_probability(p, "p");
  detail::require_probability(x, "x");
  const double xn = detail::spontaneous_rate(x, n);
  if (p == 1.0) return xn == 1.0 ? 1.0 / static_cast<double>(k) : 0.0;
  return xn / (static_cast<double>(k) * (1.0 + (1.0 - xn) * -std::log1p(-p)));
}

/// Large-K approximation of Pr[F >= eps K] on rdag(K, p).
inline double cascade_tail_g(double x, std::size_t k, double p, double epsilon, unsigned n) {
  detail::require_probability(x, "x");
  detail::require_positive(static_cast<long long>(k), "K");
  detail::require_open_probability(p, "p");
  detail::require_open_unit(epsilon, "epsilon");
  const double xn = detail::spontaneous_rate(x, n);
  if (xn == 0.0) return 0.0;
  const double kd = static_cast<double>(k);
  const double log_q = std::log1p(-p);  // log(1 - p) < 0
  const double lam = -log_q;
  const double num = 1.0 - (1.0 - xn) * std::exp(kd * log_q);
  const double den = 1.0 - (1.0 - xn) * std::exp(epsilon * kd * log_q);
  return xn * (1.0 - epsilon + std::log(num / den) / (kd * lam));
}

/// Relaxation of g obtained from log t <= t: x^n (1 - eps) + 1/(K log(1/(1-p))).
inline double cascade_tail_gbar(double x, std::size_t k, double p, double epsilon, unsigned n) {
  detail::require_probability(x, "x");
  detail::require_open_probability(p, "p");
  detail::require_open_unit(epsilon, "epsilon");
  return detail::spontaneous_rate(x, n) * (1.0 - epsilon) +
         1.0 / (static_cast<double>(k) * -std::log1p(-p));
}

/// Shock level that keeps gbar <= 2 / (K log(1/(1-p))).
inline double rdag_lb_x(std::size_t k, double p, double epsilon, unsigned n) {
  detail::require_positive(static_cast<long long>(k), "K");
  detail::require_open_probability(p, "p");
  detail::require_open_unit(epsilon, "epsilon");
  const double lam = -std::log1p(-p);
  return detail::root_n(1.0 / (static_cast<double>(k) * lam * (1.0 - epsilon)), n).value;
}

// ---------------------------------------------------------------------------
// Parallel products

enum class ParallelScope { kComplexOnly, kAllProducts };

inline BoundResult parallel_bounds(std::size_t k, unsigned m, unsigned d, double epsilon, unsigned n,
                                   ParallelScope scope) {
  if (k < 3) throw ParameterError("parallel bounds need K >= 3");
  detail::require_positive(m, "m");
  detail::require_positive(d, "d");
  detail::require_open_unit(epsilon, "epsilon");
  const double kd = static_cast<double>(k);
  const double md = m;
  const double dd = d;
  BoundResult r;
  if (scope == ParallelScope::kComplexOnly) {
    r.regime = "complex-only";
    detail::set_lower(r, detail::root_n(epsilon / (dd * md) + std::sqrt(std::log(kd) / (2.0 * md * kd)), n));
    detail::set_upper(r, detail::root_n(1.0 - std::pow((1.0 - epsilon) / 2.0, 1.0 / md), n));
  } else {
    r.regime = "all-products";
    detail::set_lower(r, detail::root_n(epsilon / (2.0 * (dd + 1.0) * md) +
                                            std::sqrt(std::log(kd / 2.0) / (2.0 * md * kd)),
                                        n));
    detail::set_upper(r, detail::root_n(1.0 - (1.0 - epsilon) / (2.0 * (md + 1.0)), n));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Backward m-ary tree

/// Node count sum_{d=1..D} m^(d-1) as a double; exact far beyond generator limits.
inline double tree_size(unsigned m, unsigned depth) {
  detail::require_positive(m, "m");
  detail::require_positive(depth, "D");
  if (m == 1) return depth;
  return (std::pow(static_cast<double>(m), depth) - 1.0) / (m - 1.0);
}

/// Probability that a tier-d product of the backward tree is produced.
inline double tree_survival_q(unsigned m, unsigned depth, unsigned tier, double x, unsigned n) {
  if (tier < 1 || tier > depth + 1) throw ParameterError("tier must lie in [1, D + 1]");
  detail::require_probability(x, "x");
  if (tier == depth + 1) return 1.0;
  const double xn = detail::spontaneous_rate(x, n);
  if (xn == 1.0) return 0.0;
  // every product in the subtree below the tier-d node must have a supplier
  return std::exp(tree_size(m, depth - tier + 1) * std::log1p(-xn));
}

/// Probability that at least one raw material fails: 1 - (1 - x^n)^(m^(D-1)).
inline double tree_catastrophe_probability(unsigned m, unsigned depth, double x, unsigned n) {
  detail::require_positive(m, "m");
  detail::require_positive(depth, "D");
  detail::require_probability(x, "x");
  const double xn = detail::spontaneous_rate(x, n);
  if (xn == 1.0) return 1.0;
  const double leaves = std::pow(static_cast<double>(m), depth - 1.0);
  return -std::expm1(leaves * std::log1p(-xn));
}

/// Exponential envelope 1 - exp(-x^n m^(D-1)), never above the exact value.
inline double tree_catastrophe_envelope(unsigned m, unsigned depth, double x, unsigned n) {
  const double leaves = std::pow(static_cast<double>(m), depth - 1.0);
  return -std::expm1(-detail::spontaneous_rate(x, n) * leaves);
}

struct TreeSurvivorBounds {
  double exact = 0.0;   ///< sum_d m^(d-1) q_d
  double upper = 0.0;   ///< K x^n (D-1)/2 for m >= 2, 1/x^n for m = 1
  double lower = 0.0;   ///< K (1 - x^n (D-1)), may be negative
};

inline TreeSurvivorBounds tree_expected_survivors(unsigned m, unsigned depth, double x, unsigned n) {
  detail::require_probability(x, "x");
  const double xn = detail::spontaneous_rate(x, n);
  const double k = tree_size(m, depth);
  TreeSurvivorBounds b;
  double level = 1.0;
  for (unsigned d = 1; d <= depth; ++d) {
    b.exact += level * tree_survival_q(m, depth, d, x, n);
    level *= m;
  }
  if (m == 1) {
    b.upper = xn > 0.0 ? 1.0 / xn : std::numeric_limits<double>::infinity();
  } else {
    b.upper = k * xn * (depth - 1.0) / 2.0;
  }
  b.lower = k * (1.0 - xn * (depth - 1.0));
  return b;
}

struct TreeReport {
  BoundResult bounds;
  double node_count = 0.0;
};

inline TreeReport tree_bounds(unsigned m, unsigned depth, double epsilon, unsigned n) {
  detail::require_open_unit(epsilon, "epsilon");
  TreeReport rep;
  const double k = tree_size(m, depth);
  rep.node_count = k;
  auto& r = rep.bounds;
  // [1 - (1 - 1/K)^(1/((1-eps)K))]^(1/n)
  const double inner = (k == 1.0) ? 1.0 : -std::expm1(std::log1p(-1.0 / k) / ((1.0 - epsilon) * k));
  detail::set_lower(r, detail::root_n(inner, n));
  if (m == 1) {
    r.regime = "chain";
    detail::set_upper(r, detail::root_n(2.0 / ((1.0 - epsilon) * k), n));
  } else {
    r.regime = "m-ary";
    if (k <= 1.0) {
      detail::set_upper(r, {1.0, true});
    } else {
      detail::set_upper(r, detail::root_n((1.0 - epsilon) * std::log(static_cast<double>(m)) / std::log(k), n));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Forward Galton-Watson network

/// Smallest root of G(eta) = eta in [0, 1] for the probability generating
/// function G. Returns 1 when mu <= 1.
inline double gw_extinction(const BranchingDistribution& dist, double tol = 1e-10) {
  if (dist.mean() <= 1.0) return 1.0;
  if (dist.pgf(0.0) == 0.0) return 0.0;
  auto h = [&](double eta) { return eta - dist.pgf(eta); };
  double hi = 0.5;
  while (h(hi) <= 0.0) hi = 0.5 * (1.0 + hi);  // h > 0 just below 1 when mu > 1
  double lo = 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace detail {

/// log sum_{i<tau} mu^i z^(i+1), the expected survivors over the first tau
/// generations when each spawned product independently works with
/// probability z.
inline double gw_log_survivors(double mu, unsigned tau, double z) {
  if (z <= 0.0) return -std::numeric_limits<double>::infinity();
  const double lm = std::log(mu);
  const double lz = std::log(z);
  double acc = -std::numeric_limits<double>::infinity();
  for (unsigned i = 0; i < tau; ++i) acc = log_sum_exp(acc, i * lm + (i + 1.0) * lz);
  return acc;
}

/// log sum_{i<tau} mu^i.
inline double gw_log_size(double mu, unsigned tau) { return gw_log_survivors(mu, tau, 1.0); }

/// log sum_{i<tau} mu^i (1 - z^(i+1)), the expected failures.
inline double gw_log_failures(double mu, unsigned tau, double z) {
  const double lm = std::log(mu);
  double acc = -std::numeric_limits<double>::infinity();
  if (z <= 0.0) return gw_log_size(mu, tau);
  const double lz = std::log(z);
  for (unsigned i = 0; i < tau; ++i) {
    const double miss = -std::expm1((i + 1.0) * lz);
    if (miss > 0.0) acc = log_sum_exp(acc, i * lm + std::log(miss));
  }
  return acc;
}

inline void check_gw_args(double mu, unsigned tau, double epsilon, unsigned n) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("mu must be positive and finite");
  if (tau == 0) throw ParameterError("tau must be positive");
  require_open_unit(epsilon, "epsilon");
  if (n == 0) throw ParameterError("supplier count n must be positive");
}

/// Largest admissible x: 1 for mu < 1, (1 - 1/mu)^(1/n) for mu > 1.
inline double gw_x_cap(double mu, unsigned n) {
  return mu < 1.0 ? 1.0 : std::pow(1.0 - 1.0 / mu, 1.0 / static_cast<double>(n));
}

/// Bisection on a predicate that is false on [0, c) and true on [c, cap].
template <class Pred>
double bisect_first_true(Pred&& ok, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace detail

/// Defining inequality of the upper bound at shock level x.
inline bool gw_upper_condition(double mu, unsigned tau, double epsilon, unsigned n, double x) {
  const double z = 1.0 - detail::spontaneous_rate(x, n);
  return detail::gw_log_survivors(mu, tau, z) <=
         std::log((1.0 - epsilon) / 2.0) + detail::gw_log_size(mu, tau);
}

/// Defining inequality of the lower bound at shock level x.
inline bool gw_lower_condition(double mu, unsigned tau, double epsilon, unsigned n, double x) {
  const double z = 1.0 - detail::spontaneous_rate(x, n);
  return detail::gw_log_failures(mu, tau, z) <= std::log(epsilon);
}

struct GwRoot {
  double x = 0.0;
  /// False when no admissible x satisfies the inequality; x is then the
  /// trivial value (1 for the upper bound).
  bool feasible = true;
};

inline bool gw_upper_supported(double mu) {
  return mu < 1.0 || mu > std::exp(2.0);
}

inline bool gw_lower_supported(double mu) {
  return mu < 1.0 || mu > std::numbers::e;
}

/// Smallest admissible x at which the expected survivors over tau
/// generations drop to (1 - eps)/2 of the expected size.
inline GwRoot gw_upper_x(double mu, unsigned tau, double epsilon, unsigned n, double tol = 1e-10) {
  detail::check_gw_args(mu, tau, epsilon, n);
  if (!gw_upper_supported(mu)) {
    throw PreconditionError("upper bound root is only guaranteed for mu in (0,1) or mu > e^2");
  }
  const double cap = detail::gw_x_cap(mu, n);
  auto ok = [&](double x) { return gw_upper_condition(mu, tau, epsilon, n, x); };
  if (!ok(cap)) return {1.0, false};
  if (ok(0.0)) return {0.0, true};
  return {detail::bisect_first_true(ok, 0.0, cap, tol), true};
}

/// Largest admissible x with expected failures over tau generations <= eps.
/// Always feasible: x = 0 gives zero failures.
inline GwRoot gw_lower_x(double mu, unsigned tau, double epsilon, unsigned n, double tol = 1e-10) {
  detail::check_gw_args(mu, tau, epsilon, n);
  if (!gw_lower_supported(mu)) {
    throw PreconditionError("lower bound root is only guaranteed for mu in (0,1) or mu > e");
  }
  const double cap = detail::gw_x_cap(mu, n);
  auto bad = [&](double x) { return !gw_lower_condition(mu, tau, epsilon, n, x); };
  if (!bad(cap)) return {cap, true};
  // sup of the feasible prefix: bisect for the first infeasible point, step back
  double lo = 0.0;
  double hi = cap;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (bad(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, true};
}

struct GwBoundPair {
  GwRoot upper;
  GwRoot lower;
};

inline GwBoundPair gw_bounds(double mu, unsigned tau, double epsilon, unsigned n) {
  return {gw_upper_x(mu, tau, epsilon, n), gw_lower_x(mu, tau, epsilon, n)};
}

/// Distribution of the number of populated generations tau, restricted to
/// processes that died out within max_tau generations.
struct ExtinctionLaw {
  std::vector<double> prob;   ///< prob[k] = Pr[tau = k | extinct by max_tau], k = 1..max_tau
  double extinct_mass = 0.0;  ///< Pr[tau <= max_tau] (exact) or extinct fraction (simulated)
  std::size_t samples = 0;    ///< 0 for the exact law
};

/// Exact law from PGF iterates: Pr[tau <= k] = G^k(0).
inline ExtinctionLaw extinction_law_exact(const BranchingDistribution& dist, unsigned max_tau) {
  detail::require_positive(max_tau, "max_tau");
  ExtinctionLaw law;
  law.prob.assign(max_tau + 1, 0.0);
  double prev = 0.0;
  for (unsigned k = 1; k <= max_tau; ++k) {
    const double cur = dist.pgf(prev);
    law.prob[k] = cur - prev;
    prev = cur;
  }
  law.extinct_mass = prev;
  if (prev > 0.0) {
    for (auto& p : law.prob) p /= prev;
  }
  return law;
}

/// Outcome of simulating generation sizes for `samples` processes.
struct ExtinctionSample {
  std::vector<std::size_t> counts;  ///< counts[k] = #processes with tau = k
  std::size_t extinct = 0;
  std::size_t samples = 0;

  double extinct_fraction() const {
    return samples == 0 ? 0.0 : static_cast<double>(extinct) / static_cast<double>(samples);
  }
};

/// Simulates generation sizes only (no graph). A process whose population
/// exceeds the cap is counted as surviving: the cap is chosen so that the
/// chance of later extinction, eta*^cap, is below 1e-12.
inline ExtinctionSample simulate_extinction(const BranchingDistribution& dist, std::size_t samples,
                                            unsigned max_tau, std::uint64_t seed) {
  detail::require_positive(max_tau, "max_tau");
  if (samples == 0) throw ParameterError("samples must be positive");
  const double eta = gw_extinction(dist);
  std::uint64_t cap = 10'000'000;
  if (eta < 1.0) {
    cap = eta <= 0.0 ? 1 : static_cast<std::uint64_t>(std::ceil(std::log(1e-12) / std::log(eta)));
    cap = std::clamp<std::uint64_t>(cap, 64, 10'000'000);
  }
  ExtinctionSample out;
  out.counts.assign(max_tau + 1, 0);
  out.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, s));
    std::uint64_t pop = 1;
    for (unsigned gen = 1; gen <= max_tau; ++gen) {
      std::uint64_t next = 0;
      for (std::uint64_t i = 0; i < pop && next <= cap; ++i) next += dist.sample(rng);
      if (next == 0) {
        ++out.counts[gen];
        ++out.extinct;
        break;
      }
      if (next > cap) break;
      pop = next;
    }
  }
  return out;
}

inline ExtinctionLaw extinction_law_simulated(const BranchingDistribution& dist, std::size_t samples,
                                              unsigned max_tau, std::uint64_t seed) {
  const auto sim = simulate_extinction(dist, samples, max_tau, seed);
  ExtinctionLaw law;
  law.samples = samples;
  law.prob.assign(max_tau + 1, 0.0);
  law.extinct_mass = sim.extinct_fraction();
  if (sim.extinct > 0) {
    for (unsigned k = 1; k <= max_tau; ++k) {
      law.prob[k] = static_cast<double>(sim.counts[k]) / static_cast<double>(sim.extinct);
    }
  }
  return law;
}

struct GwExpectedBounds {
  std::optional<double> upper;  ///< sum_k Pr[tau = k] xbar(mu, k, eps)
  std::optional<double> lower;  ///< sum_k Pr[tau = k] xunder(mu, k, eps)
  /// Mass of extinction times at which the upper inequality had no root
  /// (counted with the trivial value 1).
  double infeasible_upper_mass = 0.0;
  double extinct_mass = 0.0;
};

/// Averages the per-tau roots over an extinction law. Unsupported regimes
/// leave the corresponding field empty.
inline GwExpectedBounds gw_expected_bounds(double mu, const ExtinctionLaw& law, double epsilon,
                                           unsigned n) {
  GwExpectedBounds out;
  out.extinct_mass = law.extinct_mass;
  const bool up = gw_upper_supported(mu);
  const bool lo = gw_lower_supported(mu);
  if (!up && !lo) {
    throw PreconditionError("no bound is covered for mu in [1, e]");
  }
  double su = 0.0;
  double sl = 0.0;
  for (unsigned k = 1; k < law.prob.size(); ++k) {
    const double w = law.prob[k];
    if (w <= 0.0) continue;
    if (up) {
      const auto r = gw_upper_x(mu, k, epsilon, n);
      su += w * r.x;
      if (!r.feasible) out.infeasible_upper_mass += w;
    }
    if (lo) sl += w * gw_lower_x(mu, k, epsilon, n).x;
  }
  if (up) out.upper = su;
  if (lo) out.lower = sl;
  return out;
}

/// Convenience form with a simulated extinction law (defaults 1e5 samples,
/// depth cap 1e3).
inline GwExpectedBounds gw_expected_bounds(const BranchingDistribution& dist, double epsilon,
                                           unsigned n, unsigned max_tau = 1000,
                                           std::size_t samples = 100'000, std::uint64_t seed = 0) {
  const auto law = extinction_law_simulated(dist, samples, max_tau, seed);
  return gw_expected_bounds(dist.mean(), law, epsilon, n);
}

// ---------------------------------------------------------------------------
// Random width-w trellis

inline BoundResult trellis_bounds(unsigned w, unsigned depth, double p, double epsilon, unsigned n) {
  detail::require_positive(w, "w");
  detail::require_positive(depth, "D");
  detail::require_probability(p, "p");
  detail::require_open_unit(epsilon, "epsilon");
  const double wd = w;
  const double dd = depth;
  const double k = wd * dd;
  const double r = p * wd;
  BoundResult out;
  const bool critical = std::abs(r - 1.0) <= 1e-12;
  if (critical) {
    out.regime = "pw=1";
    // C K^2 x^n / w^2 = eps with C = 1
    detail::set_lower(out, detail::root_n(epsilon / (dd * dd), n));
    // x^n K^2 / (2 w^2) = (1 + eps) K / 2
    detail::set_upper(out, detail::root_n((1.0 + epsilon) * wd * wd / k, n));
  } else if (r < 1.0) {
    out.regime = "pw<1";
    // C = 1/(1 - pw)
    detail::set_lower(out, detail::root_n(epsilon * (1.0 - r) / (dd * dd), n));
    detail::set_upper(out, detail::root_n((1.0 + epsilon) * wd * (1.0 - r) / 2.0, n));
  } else {
    out.regime = "pw>1";
    // (K x^n / w) (pw)^(K/w) / (pw - 1) = eps, in log space
    const double log_t = std::log(epsilon * wd * (r - 1.0) / k) - dd * std::log(r);
    detail::set_lower(out, detail::root_n_log(log_t, n));
    // x^n K^2 / (2 w) = (1 + eps) K / 2
    detail::set_upper(out, detail::root_n((1.0 + epsilon) * wd / k, n));
  }
  return out;
}

}  // namespace supplynet
