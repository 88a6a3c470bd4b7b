#include "concord/classic.hpp"

#include <algorithm>
#include <cmath>

#include "concord/errors.hpp"
#include "concord/special.hpp"

namespace concord {

double pearson(const SampleMoments& m) {
  if (m.var_x <= 0.0 || m.var_y <= 0.0)
    throw degenerate_error("pearson: undefined for zero variance");
  return m.cov_xy / std::sqrt(m.var_x * m.var_y);
}

double lin_ccc(const SampleMoments& m) {
  const double shift = m.mean_x - m.mean_y;
  const double denom = m.var_x + m.var_y + shift * shift;
  if (denom == 0.0) return 1.0;  // both channels constant and equal
  return 2.0 * m.cov_xy / denom;
}

CccDecomposition ccc_decompose(const BivariateNormalParams& p) {
  if (p.var_x <= 0.0 || p.var_y <= 0.0)
    throw degenerate_error("ccc_decompose: undefined for zero variance");
  const double sx = std::sqrt(p.var_x);
  const double sy = std::sqrt(p.var_y);
  CccDecomposition d;
  d.rho = p.cov_xy / (sx * sy);
  d.v = sx / sy;
  d.u = (p.mu_x - p.mu_y) / std::sqrt(sx * sy);
  d.c_b = 2.0 / (d.v + 1.0 / d.v + d.u * d.u);
  return d;
}

double FisherZInference::p_value(double rho0) const {
  if (sigma_z <= 0.0 || !std::isfinite(sigma_z)) return std::nan("");
  const double z0 = fisher_z(rho0);
  const double stat = std::abs(z_hat - z0) / sigma_z;
  return 2.0 * (1.0 - normal_cdf(stat));
}

namespace {

// Lin (1989) asymptotic variance of z = atanh(rho_c_hat). The review's
// printed display disagrees with both Lin and simulation; see module tests.
double lin_z_variance(double rc, double rho, double u, std::size_t n) {
  const double rc2 = rc * rc;
  const double om = 1.0 - rc2;
  double var = (1.0 - rho * rho) * rc2 / (om * rho * rho);
  var += 2.0 * rc * rc2 * (1.0 - rc) * u * u / (rho * om * om);
  var -= rc2 * rc2 * u * u * u * u / (2.0 * rho * rho * om * om);
  return var / static_cast<double>(n - 2);
}

}  // namespace

FisherZInference ccc_inference(const PairedSample& sample, double alpha,
                               Rng rng) {
  if (sample.n() < 3)
    throw insufficient_data_error("ccc_inference: need n >= 3");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw invalid_argument_error("ccc_inference: alpha must lie in (0,1)");

  const SampleMoments m = summarize(sample, DivisorMode::unbiased);
  const double rc = lin_ccc(m);

  FisherZInference inf;
  inf.estimate = rc;
  inf.alpha = alpha;
  inf.z_hat = fisher_z(rc);
  const double q = normal_quantile(1.0 - alpha / 2.0);

  const double rho =
      (m.var_x > 0.0 && m.var_y > 0.0) ? pearson(m) : 0.0;
  if (std::abs(rho) < 1e-8) {
    // sigma_z divides by rho; fall back to a nonparametric bootstrap.
    inf.used_bootstrap = true;
    const std::size_t n = sample.n();
    const int b = 2000;
    std::vector<double> stats;
    stats.reserve(b);
    std::vector<double> bx(n), by(n);
    for (int rep = 0; rep < b; ++rep) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = rng.uniform_below(n);
        bx[i] = sample.x()[k];
        by[i] = sample.y()[k];
      }
      try {
        stats.push_back(lin_ccc(summarize(PairedSample(bx, by),
                                          DivisorMode::unbiased)));
      } catch (const error&) {
        // degenerate resample; skip
      }
    }
    std::sort(stats.begin(), stats.end());
    auto quantile = [&](double p) {
      if (stats.empty()) return rc;
      const double idx = p * static_cast<double>(stats.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(idx);
      const std::size_t hi = std::min(lo + 1, stats.size() - 1);
      const double w = idx - static_cast<double>(lo);
      return (1.0 - w) * stats[lo] + w * stats[hi];
    };
    inf.ci_low = quantile(alpha / 2.0);
    inf.ci_high = quantile(1.0 - alpha / 2.0);
    double mean_z = 0.0, ss = 0.0;
    for (double s : stats) mean_z += fisher_z(s);
    mean_z /= static_cast<double>(stats.size());
    for (double s : stats) {
      const double d = fisher_z(s) - mean_z;
      ss += d * d;
    }
    inf.sigma_z = std::sqrt(ss / static_cast<double>(stats.size() - 1));
    return inf;
  }

  if (std::abs(rc) >= 1.0 - 1e-12) {
    inf.degenerate = true;
    inf.sigma_z = 0.0;
    inf.ci_low = inf.ci_high = std::clamp(rc, -1.0, 1.0);
    return inf;
  }

  const double u = (m.mean_x - m.mean_y) / std::sqrt(std::sqrt(m.var_x) *
                                                     std::sqrt(m.var_y));
  inf.sigma_z = std::sqrt(lin_z_variance(rc, rho, u, sample.n()));
  inf.ci_low = std::tanh(inf.z_hat - q * inf.sigma_z);
  inf.ci_high = std::tanh(inf.z_hat + q * inf.sigma_z);
  return inf;
}

LimitsOfAgreement bland_altman(const PairedSample& sample, double multiplier) {
  const std::size_t n = sample.n();
  LimitsOfAgreement loa;
  loa.coverage_multiplier = multiplier;
  loa.pair_means.resize(n);
  loa.pair_diffs.resize(n);

  double mean_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    loa.pair_means[i] = 0.5 * (sample.x()[i] + sample.y()[i]);
    loa.pair_diffs[i] = sample.x()[i] - sample.y()[i];
    mean_d += loa.pair_diffs[i];
  }
  mean_d /= static_cast<double>(n);

  double ss = 0.0;
  for (double d : loa.pair_diffs) ss += (d - mean_d) * (d - mean_d);
  loa.mean_diff = mean_d;
  loa.sd_diff = std::sqrt(ss / static_cast<double>(n - 1));
  loa.lower = mean_d - multiplier * loa.sd_diff;
  loa.upper = mean_d + multiplier * loa.sd_diff;
  return loa;
}

double ccc_from_mse(double mse, double cov_ml) {
  if (mse < 0.0) throw invalid_argument_error("ccc_from_mse: MSE < 0");
  if (cov_ml == 0.0)
    throw degenerate_error("ccc_from_mse: undefined for zero covariance");
  return 1.0 / (1.0 + mse / (2.0 * cov_ml));
}

double mean_squared_error(const PairedSample& sample) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const double d = sample.x()[i] - sample.y()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(sample.n());
}

double ccc_transform_first_order(double g_at_mu, double g_prime_at_mu,
                                 double mu_x, double var_x) {
  if (var_x <= 0.0)
    throw invalid_argument_error("ccc_transform_first_order: var_x <= 0");
  const double shift = mu_x - g_at_mu;
  const double denom =
      var_x * (1.0 + g_prime_at_mu * g_prime_at_mu) + shift * shift;
  if (denom == 0.0)
    throw degenerate_error("ccc_transform_first_order: zero denominator");
  return 2.0 * g_prime_at_mu * var_x / denom;
}

double ccc_transform_perturbation(double h_at_mu, double h_prime_at_mu,
                                  double var_x, double eps) {
  if (var_x <= 0.0)
    throw invalid_argument_error("ccc_transform_perturbation: var_x <= 0");
  return 1.0 - eps * eps * h_at_mu * h_at_mu / (2.0 * var_x) -
         0.5 * eps * eps * h_prime_at_mu * h_prime_at_mu;
}

CalibrationReport calibrate_and_agree(const PairedSample& sample, double alpha,
                                      Rng rng) {
  if (sample.n() < 3)
    throw insufficient_data_error("calibrate_and_agree: need n >= 3");
  const SampleMoments m = summarize(sample, DivisorMode::unbiased);
  if (m.var_x <= 0.0)
    throw degenerate_error("calibrate_and_agree: singular fit (constant x)");

  CalibrationReport rep;
  rep.n = sample.n();
  rep.slope = m.cov_xy / m.var_x;
  rep.intercept = m.mean_y - rep.slope * m.mean_x;

  rep.predicted.resize(sample.n());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    rep.predicted[i] = rep.intercept + rep.slope * sample.x()[i];
    const double r = sample.y()[i] - rep.predicted[i];
    const double t = sample.y()[i] - m.mean_y;
    ss_res += r * r;
    ss_tot += t * t;
  }
  if (ss_tot == 0.0)
    throw degenerate_error("calibrate_and_agree: constant response");
  rep.r2 = 1.0 - ss_res / ss_tot;
  const double n = static_cast<double>(sample.n());
  rep.r2_adj = 1.0 - (1.0 - rep.r2) * (n - 1.0) / (n - 2.0);

  // Agreement between the reference and its regression reconstruction.
  rep.ccc = ccc_inference(PairedSample(sample.y(), rep.predicted), alpha, rng);
  return rep;
}

}  // namespace concord
