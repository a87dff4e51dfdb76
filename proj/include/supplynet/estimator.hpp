#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "supplynet/errors.hpp"
#include "supplynet/network.hpp"
#include "supplynet/parallel.hpp"
#include "supplynet/percolation.hpp"

namespace supplynet {

/// Survivors needed for "at most an epsilon fraction fails": ceil((1 - eps) K).
/// The 1e-9 slack keeps exact products such as 0.9 * 10 from rounding up.
inline std::size_t required_survivors(std::size_t k, double epsilon) {
  const double target = (1.0 - epsilon) * static_cast<double>(k);
  return static_cast<std::size_t>(std::max(0.0, std::ceil(target - 1e-9)));
}

struct ProbabilityEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
};

inline double binomial_stderr(double p, std::size_t trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

/// Fraction of trials (seeds derive_seed(seed, t)) with S >= ceil((1 - eps) K).
inline ProbabilityEstimate estimate_survival_prob(const ProductionNetwork& net, double x, unsigned n,
                                                  double epsilon, std::size_t trials,
                                                  std::uint64_t seed, double y = 1.0) {
  detail::require_probability(x, "x");
  detail::require_open_unit(epsilon, "epsilon");
  if (trials == 0) throw ParameterError("trials must be positive");
  const std::size_t need = required_survivors(net.node_count(), epsilon);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto out = run_trial(net, PercolationConfig{x, y, n, derive_seed(seed, t)});
    if (out.survivors >= need) ++hits;
  }
  ProbabilityEstimate est;
  est.successes = hits;
  est.trials = trials;
  est.value = static_cast<double>(hits) / static_cast<double>(trials);
  est.stderr_ = binomial_stderr(est.value, trials);
  return est;
}

/// Per-trial failure thresholds sorted in decreasing order. With these,
/// "S(x) >= s" in trial t is exactly "the s-th largest threshold >= x", so
/// every (x, epsilon) query reuses the same coupled trials.
class SurvivalProfiles {
 public:
  SurvivalProfiles(const ProductionNetwork& net, unsigned n, std::size_t trials, std::uint64_t seed,
                   double y = 1.0, unsigned workers = 1)
      : k_(net.node_count()), sorted_(trials) {
    if (trials == 0) throw ParameterError("trials must be positive");
    if (n == 0) throw ParameterError("supplier count n must be positive");
    detail::require_probability(y, "y");
    detail::parallel_for(trials, workers, [&](std::size_t t) {
      const auto draws = TrialDraws::sample(net, n, y, derive_seed(seed, t));
      auto th = failure_thresholds(net, draws, y, n);
      std::sort(th.begin(), th.end(), std::greater<>{});
      sorted_[t] = std::move(th);
    });
  }

  std::size_t node_count() const noexcept { return k_; }
  std::size_t trials() const noexcept { return sorted_.size(); }

  /// Survivors of trial t at level x.
  std::size_t survivors(std::size_t t, double x) const {
    const auto& th = sorted_[t];
    // thresholds >= x form a prefix of the decreasing sequence
    return static_cast<std::size_t>(
        std::partition_point(th.begin(), th.end(), [x](double v) { return v >= x; }) - th.begin());
  }

  /// Per-trial largest x at which the trial still has >= s survivors,
  /// sorted ascending. s = 0 is satisfied at every x (value 2).
  std::vector<double> critical_levels(std::size_t s) const {
    std::vector<double> c(sorted_.size());
    for (std::size_t t = 0; t < sorted_.size(); ++t) {
      c[t] = (s == 0) ? 2.0 : (s > k_ ? -1.0 : sorted_[t][s - 1]);
    }
    std::sort(c.begin(), c.end());
    return c;
  }

 private:
  std::size_t k_;
  std::vector<std::vector<double>> sorted_;
};

namespace detail {

/// #trials whose critical level is >= x, given ascending critical levels.
inline std::size_t count_at_least(const std::vector<double>& ascending, double x) {
  return static_cast<std::size_t>(ascending.end() -
                                  std::lower_bound(ascending.begin(), ascending.end(), x));
}

/// Grid scan then bisection for the largest x whose estimated survival
/// probability reaches 1 - 1/K. `qualifies` must be monotone (true on a
/// prefix of [0, 1]).
template <class Pred>
double scan_and_refine(Pred&& qualifies, double x_step) {
  const auto steps = static_cast<std::size_t>(std::floor(1.0 / x_step + 1e-9));
  std::vector<double> grid;
  for (std::size_t i = 0; i <= steps; ++i) grid.push_back(std::min(1.0, i * x_step));
  if (grid.back() < 1.0) grid.push_back(1.0);

  std::size_t best = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!qualifies(grid[i])) break;  // monotone: nothing further qualifies
    best = i;
  }
  if (best == grid.size()) return 0.0;
  if (best + 1 == grid.size()) return grid[best];
  double lo = grid[best];
  double hi = grid[best + 1];
  const double tol = x_step / 16.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (qualifies(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

inline void validate_x_step(double x_step) {
  if (!(x_step > 0.0 && x_step <= 0.1)) {
    throw ParameterError("x_step must lie in (0, 0.1]");
  }
}

}  // namespace detail

/// Estimated resilience at a single epsilon from precomputed profiles.
/// Qualification is the integer test hits * K >= trials * (K - 1), i.e.
/// estimated Pr[S >= ceil((1-eps)K)] >= 1 - 1/K without rounding error.
inline double resilience_from_profiles(const SurvivalProfiles& prof, double epsilon, double x_step) {
  detail::require_open_unit(epsilon, "epsilon");
  detail::validate_x_step(x_step);
  const std::size_t k = prof.node_count();
  const auto critical = prof.critical_levels(required_survivors(k, epsilon));
  const std::size_t trials = prof.trials();
  auto qualifies = [&](double x) {
    const std::size_t hits = detail::count_at_least(critical, x);
    return hits * k >= trials * (k - 1);
  };
  return detail::scan_and_refine(qualifies, x_step);
}

inline double estimate_resilience(const ProductionNetwork& net, double epsilon, unsigned n,
                                  std::size_t trials, double x_step, std::uint64_t seed,
                                  double y = 1.0) {
  detail::require_open_unit(epsilon, "epsilon");
  detail::validate_x_step(x_step);
  const SurvivalProfiles prof(net, n, trials, seed, y);
  return resilience_from_profiles(prof, epsilon, x_step);
}

struct ResilienceCurve {
  std::vector<double> epsilon;
  std::vector<double> r_hat;
  /// Binomial standard error of the survival-probability estimate at r_hat.
  std::vector<double> stderr_;
  double auc = 0.0;
  std::size_t trials = 0;
  double x_step = 0.0;
  std::uint64_t seed = 0;
  unsigned n = 1;
};

/// Trapezoid rule over [0, 1] with the first value extended flat down to 0
/// and the last value flat up to 1.
inline double curve_auc(const std::vector<double>& eps, const std::vector<double>& r) {
  if (eps.empty()) return 0.0;
  double area = r.front() * eps.front();
  for (std::size_t i = 1; i < eps.size(); ++i) {
    area += 0.5 * (r[i] + r[i - 1]) * (eps[i] - eps[i - 1]);
  }
  area += r.back() * (1.0 - eps.back());
  return area;
}

inline std::vector<double> default_epsilon_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 19; ++i) g.push_back(i / 20.0);
  return g;
}

/// Every epsilon is evaluated on the same trials, so r_hat is nondecreasing
/// in epsilon exactly, not just in expectation.
inline ResilienceCurve resilience_curve(const ProductionNetwork& net,
                                        const std::vector<double>& epsilon_grid, unsigned n,
                                        std::size_t trials, double x_step, std::uint64_t seed,
                                        double y = 1.0, unsigned workers = 1) {
  if (epsilon_grid.empty()) throw ParameterError("epsilon grid must not be empty");
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    detail::require_open_unit(epsilon_grid[i], "epsilon");
    if (i > 0 && !(epsilon_grid[i] > epsilon_grid[i - 1])) {
      throw ParameterError("epsilon grid must be strictly increasing");
    }
  }
  detail::validate_x_step(x_step);
  const SurvivalProfiles prof(net, n, trials, seed, y, workers);
  ResilienceCurve curve;
  curve.epsilon = epsilon_grid;
  curve.trials = trials;
  curve.x_step = x_step;
  curve.seed = seed;
  curve.n = n;
  for (double eps : epsilon_grid) {
    const double r = resilience_from_profiles(prof, eps, x_step);
    const auto critical = prof.critical_levels(required_survivors(net.node_count(), eps));
    const double p =
        static_cast<double>(detail::count_at_least(critical, r)) / static_cast<double>(trials);
    curve.r_hat.push_back(r);
    curve.stderr_.push_back(binomial_stderr(p, trials));
  }
  curve.auc = curve_auc(curve.epsilon, curve.r_hat);
  return curve;
}

struct EnsembleEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> values;
};

/// Resilience of a random-graph ensemble: estimated per realization (each
/// with its own K), then averaged. `make_network(i)` builds realization i.
inline EnsembleEstimate ensemble_resilience(
    const std::function<ProductionNetwork(std::uint64_t)>& make_network, std::size_t realizations,
    double epsilon, unsigned n, std::size_t trials, double x_step, std::uint64_t seed) {
  if (realizations == 0) throw ParameterError("realizations must be positive");
  EnsembleEstimate est;
  for (std::size_t i = 0; i < realizations; ++i) {
    const auto net = make_network(derive_seed(seed ^ 0xa5a5a5a5ULL, i));
    est.values.push_back(estimate_resilience(net, epsilon, n, trials, x_step, derive_seed(seed, i)));
  }
  double s = 0.0;
  for (double v : est.values) s += v;
  est.mean = s / static_cast<double>(realizations);
  if (realizations > 1) {
    double ss = 0.0;
    for (double v : est.values) ss += (v - est.mean) * (v - est.mean);
    est.stderr_ = std::sqrt(ss / static_cast<double>(realizations - 1) / static_cast<double>(realizations));
  }
  return est;
}

}  // namespace supplynet
