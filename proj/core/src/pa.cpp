#include "concord/pa.hpp"

#include <algorithm>
#include <cmath>

#include "concord/errors.hpp"
#include "concord/special.hpp"
#include "concord/stats_util.hpp"

namespace concord {

PaSpec pa_spec_from_params(const BivariateNormalParams& p, double c) {
  PaSpec spec;
  spec.mu_d = p.mu_x - p.mu_y;
  const double v = p.var_x + p.var_y - 2.0 * p.cov_xy;
  if (v < -1e-12 * std::max(1.0, p.var_x + p.var_y))
    throw invalid_covariance_error("pa_spec_from_params: negative sigma_d^2");
  spec.sigma_d = std::sqrt(std::max(v, 0.0));
  spec.c = c;
  return spec;
}

double pa_normal(const PaSpec& spec) {
  if (!(spec.c > 0.0))
    throw invalid_argument_error("pa_normal: c must be > 0");
  if (spec.sigma_d < 0.0)
    throw invalid_argument_error("pa_normal: sigma_d must be >= 0");
  if (spec.sigma_d == 0.0)
    return std::abs(spec.mu_d) <= spec.c ? 1.0 : 0.0;
  return normal_cdf((spec.c - spec.mu_d) / spec.sigma_d) -
         normal_cdf(-(spec.c + spec.mu_d) / spec.sigma_d);
}

PaCurve pa_curve(const BivariateNormalParams& p,
                 const std::vector<double>& c_grid,
                 const std::string& provenance) {
  if (c_grid.empty()) throw invalid_argument_error("pa_curve: empty grid");
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    if (!(c_grid[i] > 0.0))
      throw invalid_argument_error("pa_curve: grid values must be > 0");
    if (i > 0 && !(c_grid[i] > c_grid[i - 1]))
      throw invalid_argument_error("pa_curve: grid must be ascending");
  }
  PaCurve curve;
  curve.c_grid = c_grid;
  curve.provenance = provenance;
  curve.values.reserve(c_grid.size());
  for (double c : c_grid) curve.values.push_back(pa_normal(pa_spec_from_params(p, c)));
  return curve;
}

PaInference pa_inference(const PairedSample& sample, double c, double alpha,
                         int b, Rng& rng) {
  if (sample.n() < 3)
    throw insufficient_data_error("pa_inference: need n >= 3");
  if (!(c > 0.0)) throw invalid_argument_error("pa_inference: c must be > 0");
  if (b < 1) throw invalid_argument_error("pa_inference: need b >= 1");

  const BivariateNormalFit fit = fit_bivariate_normal(sample);
  const PaSpec spec = pa_spec_from_params(fit.params, c);
  const double psi_hat = pa_normal(spec);

  PaInference out;
  out.estimate.estimate = psi_hat;
  out.estimate.alpha = alpha;
  out.estimate.method = "parametric-bootstrap";
  out.interchangeable = psi_hat >= 0.95;

  if (spec.sigma_d == 0.0) {
    out.degenerate = true;
    out.estimate.std_error = 0.0;
    out.estimate.ci_low = out.estimate.ci_high = psi_hat;
    return out;
  }

  // Parametric bootstrap: refit on samples drawn from the fitted normal.
  const BivariateNormalParams& p = fit.params;
  const double sx = std::sqrt(p.var_x);
  const double cond_sd =
      sx > 0.0 ? std::sqrt(std::max(p.var_y - p.cov_xy * p.cov_xy / p.var_x, 0.0))
               : std::sqrt(p.var_y);
  const std::size_t n = sample.n();
  std::vector<double> bx(n), by(n), stats;
  stats.reserve(b);
  for (int rep = 0; rep < b; ++rep) {
    Rng task = rng.derive(static_cast<std::uint64_t>(rep));
    for (std::size_t i = 0; i < n; ++i) {
      const double z1 = task.normal();
      const double z2 = task.normal();
      bx[i] = p.mu_x + sx * z1;
      by[i] = p.mu_y + (sx > 0.0 ? p.cov_xy / sx : 0.0) * z1 + cond_sd * z2;
    }
    const BivariateNormalFit refit = fit_bivariate_normal(PairedSample(bx, by));
    stats.push_back(pa_normal(pa_spec_from_params(refit.params, c)));
  }
  std::sort(stats.begin(), stats.end());
  out.estimate.std_error = sd_of(stats);
  out.estimate.ci_low = quantile_sorted(stats, alpha / 2.0);
  out.estimate.ci_high = quantile_sorted(stats, 1.0 - alpha / 2.0);
  return out;
}

}  // namespace concord
