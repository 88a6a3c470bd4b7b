#include "concord/optim.hpp"

#include <algorithm>
#include <cmath>

#include "concord/errors.hpp"

namespace concord {

ScalarMinResult golden_section_min(const std::function<double(double)>& f,
                                   double a, double b, double x_tol,
                                   int max_iter) {
  if (!(b > a)) throw invalid_argument_error("golden_section_min: b <= a");
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  ScalarMinResult res;
  res.evaluations = 2;
  for (int it = 0; it < max_iter; ++it) {
    if (b - a < x_tol) {
      res.converged = true;
      break;
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
    ++res.evaluations;
  }
  if (fc < fd) {
    res.x = c;
    res.value = fc;
  } else {
    res.x = d;
    res.value = fd;
  }
  return res;
}

ScalarMinResult grid_then_golden(const std::function<double(double)>& f,
                                 double a, double b, int grid_points,
                                 double x_tol) {
  if (grid_points < 3)
    throw invalid_argument_error("grid_then_golden: need >= 3 grid points");
  double best_x = a, best_f = f(a);
  int evals = 1;
  const double h = (b - a) / static_cast<double>(grid_points - 1);
  for (int i = 1; i < grid_points; ++i) {
    const double x = a + h * i;
    const double v = f(x);
    ++evals;
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  const double lo = std::max(a, best_x - h);
  const double hi = std::min(b, best_x + h);
  ScalarMinResult res = golden_section_min(f, lo, hi, x_tol);
  res.evaluations += evals;
  if (best_f < res.value) {
    res.x = best_x;
    res.value = best_f;
  }
  return res;
}

NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, const std::vector<double>& step, double f_tol,
    int max_iter) {
  const std::size_t n = start.size();
  if (step.size() != n)
    throw invalid_argument_error("nelder_mead: step size mismatch");

  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  int evals = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    fv[i] = f(pts[i]);
    ++evals;
  }

  NelderMeadResult res;
  for (int it = 0; it < max_iter; ++it) {
    // order
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];

    if (std::abs(fv[worst] - fv[best]) <
        f_tol * (std::abs(fv[best]) + f_tol)) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k];
    }
    for (std::size_t k = 0; k < n; ++k) centroid[k] /= static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k)
        p[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
      return p;
    };

    std::vector<double> xr = blend(-1.0);
    double fr = f(xr);
    ++evals;
    if (fr < fv[idx[0]]) {
      std::vector<double> xe = blend(-2.0);
      double fe = f(xe);
      ++evals;
      if (fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
    } else {
      std::vector<double> xc = blend(fr < fv[worst] ? -0.5 : 0.5);
      double fc = f(xc);
      ++evals;
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = std::move(xc);
        fv[worst] = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k)
            pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
          fv[i] = f(pts[i]);
          ++evals;
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  res.x = pts[best];
  res.value = fv[best];
  res.evaluations = evals;
  return res;
}

}  // namespace concord
