#pragma once

#include <functional>
#include <vector>

namespace concord {

struct ScalarMinResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Golden-section minimization of a unimodal f on [a, b].
ScalarMinResult golden_section_min(const std::function<double(double)>& f,
                                   double a, double b, double x_tol,
                                   int max_iter = 200);

/// Coarse grid scan followed by golden-section refinement around the best
/// grid point. Robust to mild multimodality; the scan points double as
/// multi-start for the local stage.
ScalarMinResult grid_then_golden(const std::function<double(double)>& f,
                                 double a, double b, int grid_points,
                                 double x_tol);

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead with standard reflection/expansion
/// coefficients. `step` sets the initial simplex edge per coordinate.
NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, const std::vector<double>& step, double f_tol,
    int max_iter = 500);

}  // namespace concord
