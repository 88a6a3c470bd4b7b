#pragma once

#include <functional>

namespace concord {

/// Adaptive 15-point Gauss-Kronrod integration of f over [a, b] to an
/// absolute tolerance. Throws numeric_error when the recursion budget is
/// exhausted before the tolerance is met.
double gk15_adaptive(const std::function<double(double)>& f, double a,
                     double b, double abs_tol, int max_depth = 48);

/// Integral of f over (-inf, b], computed on the transformed half-line
/// r = b - (1-t)/t, t in (0, 1]. The integrand must decay at -inf.
double integrate_half_line(const std::function<double(double)>& f, double b,
                           double abs_tol);

}  // namespace concord
