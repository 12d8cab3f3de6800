#pragma once

// Driver patience and the delay -> satisfaction probability mapping.

#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include "roadrel/structure.hpp"

namespace roadrel {

/// Weibull patience threshold with scale lambda (seconds) and shape k.
struct WeibullPatience {
  double lambda = 30.0;
  double k = 2.92;

  void validate() const;
  /// P(threshold <= t).
  double cdf(double t) const;
  double density(double t) const;
  /// Smallest T with tail mass P(threshold > T) below `mass`.
  double quantile_upper(double mass) const;
};

/// Q(delay) = exp(-(delay/lambda)^k); an infinite delay gives 0.
double satisfaction_probability(const WeibullPatience& model, double delay);

/// Realized delay as a distribution: a point, an empirical sample, or a CDF.
class DelayDistribution {
 public:
  static DelayDistribution deterministic(double delay);
  static DelayDistribution empirical(std::vector<double> samples);
  /// cdf(t) = P(delay <= t); breakpoints are jump locations, if any.
  static DelayDistribution from_cdf(std::function<double(double)> cdf, std::vector<double> breakpoints = {});

  /// P(delay < t), the strict-boundary acceptance probability.
  double prob_below(double t) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  std::vector<double> sorted_;
  std::function<double(double)> cdf_;
  std::vector<double> breakpoints_;
};

struct PointMass {
  double at = 0.0;
};
struct UniformPatience {
  double lo = 0.0, hi = 1.0;
};
/// Arbitrary threshold law given by its CDF on [0, upper].
struct CustomPatience {
  std::function<double(double)> cdf;
  double upper = 0.0;
};
using PatienceComponent = std::variant<PointMass, WeibullPatience, UniformPatience, CustomPatience>;

/// Weighted mixture of patience threshold distributions (weights sum to 1).
class PatienceMixture {
 public:
  PatienceMixture(std::vector<std::pair<PatienceComponent, double>> parts);
  static PatienceMixture single(PatienceComponent c) { return PatienceMixture({{std::move(c), 1.0}}); }

  const std::vector<std::pair<PatienceComponent, double>>& parts() const { return parts_; }

 private:
  std::vector<std::pair<PatienceComponent, double>> parts_;
};

/// p = int Q(u) dPi(u), where Q(u) = P(delay < u). Point masses are summed
/// exactly; continuous parts use adaptive Simpson split at delay jumps.
double mean_reliability(const DelayDistribution& delay, const PatienceMixture& patience,
                        double rel_tol = 1e-10);

/// Elementwise Q over per-segment delays.
ReliabilityVector delays_to_reliability_vector(const std::vector<double>& delays, const WeibullPatience& model,
                                               std::size_t expected_size);

inline constexpr double kSaturatedDelay = std::numeric_limits<double>::infinity();

}  // namespace roadrel
