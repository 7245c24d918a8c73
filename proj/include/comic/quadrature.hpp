#pragma once

#include <functional>

namespace comic {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]. Nodes never touch the
/// endpoints, so integrable endpoint singularities are allowed.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10,
                           double rel_tol = 1e-10, int max_depth = 60);

/// Iterated adaptive integral over [a1, b1] x [a2, b2].
QuadratureResult integrate_2d(const std::function<double(double, double)>& f, double a1, double b1, double a2,
                              double b2, double abs_tol = 1e-9, double rel_tol = 1e-9);

}  // namespace comic
