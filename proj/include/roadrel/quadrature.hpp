#pragma once

#include <functional>

namespace roadrel {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

/// Adaptive composite Simpson rule on [a, b] with Richardson correction.
/// Tolerance is relative to the magnitude of the coarse whole-interval
/// estimate, with abs_floor as a lower bound on the absolute tolerance.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = 1e-8, double abs_floor = 1e-15, int max_depth = 40);

}  // namespace roadrel
