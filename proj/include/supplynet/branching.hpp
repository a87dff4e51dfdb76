#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "supplynet/errors.hpp"
#include "supplynet/random.hpp"

namespace supplynet {

/// Offspring law of a Galton-Watson process.
class BranchingDistribution {
 public:
  enum class Kind { kPointMass, kBinomial, kPoisson };

  static BranchingDistribution point_mass(unsigned value) {
    return BranchingDistribution(Kind::kPointMass, value, 0.0, 0.0);
  }

  static BranchingDistribution binomial(unsigned trials, double p) {
    detail::require_probability(p, "binomial success probability");
    if (trials == 0) throw ParameterError("binomial trial count must be positive");
    return BranchingDistribution(Kind::kBinomial, trials, p, 0.0);
  }

  static BranchingDistribution poisson(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw ParameterError("poisson rate must be positive and finite");
    }
    return BranchingDistribution(Kind::kPoisson, 0, 0.0, rate);
  }

  Kind kind() const noexcept { return kind_; }
  unsigned count() const noexcept { return count_; }
  double probability() const noexcept { return p_; }
  double rate() const noexcept { return rate_; }

  double mean() const noexcept {
    switch (kind_) {
      case Kind::kPointMass: return static_cast<double>(count_);
      case Kind::kBinomial: return count_ * p_;
      case Kind::kPoisson: return rate_;
    }
    return 0.0;
  }

  /// Probability generating function E[eta^xi].
  double pgf(double eta) const noexcept {
    switch (kind_) {
      case Kind::kPointMass: return std::pow(eta, static_cast<double>(count_));
      case Kind::kBinomial: return std::pow(1.0 - p_ + p_ * eta, static_cast<double>(count_));
      case Kind::kPoisson: return std::exp(rate_ * (eta - 1.0));
    }
    return 0.0;
  }

  std::uint64_t sample(Rng& rng) const {
    switch (kind_) {
      case Kind::kPointMass: return count_;
      case Kind::kBinomial: {
        std::uint64_t hits = 0;
        for (unsigned i = 0; i < count_; ++i) hits += rng.bernoulli(p_) ? 1 : 0;
        return hits;
      }
      case Kind::kPoisson: {
        // Inversion in chunks of rate <= 16 keeps exp(-chunk) far from underflow.
        std::uint64_t total = 0;
        double remaining = rate_;
        while (remaining > 0.0) {
          const double chunk = std::min(remaining, 16.0);
          remaining -= chunk;
          const double u = rng.uniform();
          double term = std::exp(-chunk);
          double cdf = term;
          std::uint64_t k = 0;
          while (u >= cdf && k < 10000) {
            ++k;
            term *= chunk / static_cast<double>(k);
            cdf += term;
          }
          total += k;
        }
        return total;
      }
    }
    return 0;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::kPointMass: return "point-mass(" + std::to_string(count_) + ")";
      case Kind::kBinomial:
        return "binomial(" + std::to_string(count_) + "," + std::to_string(p_) + ")";
      case Kind::kPoisson: return "poisson(" + std::to_string(rate_) + ")";
    }
    return "?";
  }

 private:
  BranchingDistribution(Kind kind, unsigned count, double p, double rate)
      : kind_(kind), count_(count), p_(p), rate_(rate) {}

  Kind kind_;
  unsigned count_;
  double p_;
  double rate_;
};

}  // namespace supplynet
