#pragma once

#include <functional>

namespace bhlab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (15 point) on a finite interval.
QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, double rel_tol = 1e-10);

/// Same as integrate() but throws QuadratureError when not converged.
double integrate_or_throw(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol = 1e-10);

}  // namespace bhlab
