#include "concord/robust.hpp"

#include <cmath>

#include "concord/errors.hpp"
#include "concord/quadrature.hpp"
#include "concord/special.hpp"

namespace concord {

DistanceFunction DistanceFunction::power(double delta) {
  if (!(delta > 0.0))
    throw invalid_argument_error("DistanceFunction: delta must be > 0");
  return DistanceFunction(delta, 0.0);
}

DistanceFunction DistanceFunction::winsorized_power(double delta, double cap) {
  if (!(delta > 0.0))
    throw invalid_argument_error("DistanceFunction: delta must be > 0");
  if (!(cap > 0.0))
    throw invalid_argument_error("DistanceFunction: cap must be > 0");
  return DistanceFunction(delta, cap);
}

double DistanceFunction::operator()(double z) const {
  double a = std::abs(z);
  if (cap_ > 0.0 && a > cap_) a = cap_;  // continuous extension beyond z0
  if (delta_ == 2.0) return a * a;
  if (delta_ == 1.0) return a;
  return std::pow(a, delta_);
}

namespace {

struct RhoGSums {
  double cross;   // (1/n) sum_ij {g(Xi-Yj) - g(Xi+Yj)}
  double paired;  // sum_i {g(Xi-Yi) - g(Xi+Yi)}
  double scale;   // (1/2) sum_i {g(2Xi) + g(2Yi)}
};

RhoGSums rho_g_sums_direct(const PairedSample& s, const DistanceFunction& g) {
  const auto& x = s.x();
  const auto& y = s.y();
  const std::size_t n = s.n();
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      row += g(x[i] - y[j]) - g(x[i] + y[j]);
    cross += row;
  }
  RhoGSums sums{cross / static_cast<double>(n), 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    sums.paired += g(x[i] - y[i]) - g(x[i] + y[i]);
    sums.scale += 0.5 * (g(2.0 * x[i]) + g(2.0 * y[i]));
  }
  return sums;
}

RhoGSums rho_g_sums_subsampled(const PairedSample& s,
                               const DistanceFunction& g,
                               const RhoGOptions& opts) {
  const auto& x = s.x();
  const auto& y = s.y();
  const std::size_t n = s.n();
  Rng rng(opts.subsample_seed);
  double acc = 0.0;
  for (std::size_t k = 0; k < opts.subsample_pairs; ++k) {
    const std::size_t i = rng.uniform_below(n);
    const std::size_t j = rng.uniform_below(n);
    acc += g(x[i] - y[j]) - g(x[i] + y[j]);
  }
  // (1/n) sum_ij = n * mean over pairs
  RhoGSums sums{static_cast<double>(n) * acc /
                    static_cast<double>(opts.subsample_pairs),
                0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    sums.paired += g(x[i] - y[i]) - g(x[i] + y[i]);
    sums.scale += 0.5 * (g(2.0 * x[i]) + g(2.0 * y[i]));
  }
  return sums;
}

}  // namespace

double rho_g_sample(const PairedSample& sample, const DistanceFunction& g,
                    const RhoGOptions& options) {
  const RhoGSums sums = sample.n() <= options.direct_limit
                            ? rho_g_sums_direct(sample, g)
                            : rho_g_sums_subsampled(sample, g, options);
  const double num = sums.cross - sums.paired;
  const double den = sums.cross + sums.scale;
  if (den == 0.0)
    throw degenerate_error("rho_g_sample: degenerate sample (zero denominator)");
  return num / den;
}

namespace {

// E|D| for D ~ N(gamma, tau^2): folded-normal mean.
double folded_normal_mean(double gamma, double tau) {
  if (tau <= 0.0) return std::abs(gamma);
  const double a = gamma / tau;
  return gamma * (1.0 - 2.0 * normal_cdf(-a)) +
         tau * std::sqrt(2.0 / M_PI) * std::exp(-0.5 * a * a);
}

}  // namespace

double rho1_normal(const BivariateNormalParams& p) {
  const double s2 = p.var_x + p.var_y;
  if (!(s2 > 0.0))
    throw invalid_argument_error("rho1_normal: sigma_x^2 + sigma_y^2 must be > 0");
  const double tau2 = s2 - 2.0 * p.cov_xy;
  if (tau2 < -1e-12 * s2)
    throw invalid_covariance_error("rho1_normal: tau^2 < 0 (non-PSD input)");
  const double gamma = p.mu_x - p.mu_y;
  const double tau = std::sqrt(std::max(tau2, 0.0));
  return 1.0 - folded_normal_mean(gamma, tau) /
                   folded_normal_mean(gamma, std::sqrt(s2));
}

EllipticalSpec::EllipticalSpec(Generator g, double nu,
                               const BivariateNormalParams& p)
    : generator_(g), nu_(nu), params_(p) {}

EllipticalSpec EllipticalSpec::gaussian(const BivariateNormalParams& p) {
  return EllipticalSpec(Generator::gaussian, 0.0, p);
}

EllipticalSpec EllipticalSpec::student_t(double nu,
                                         const BivariateNormalParams& p) {
  if (!(nu > 2.0))
    throw invalid_argument_error(
        "EllipticalSpec: student_t requires nu > 2 (finite second moments)");
  return EllipticalSpec(Generator::student_t, nu, p);
}

double EllipticalSpec::generator_value(double u) const {
  if (generator_ == Generator::gaussian) return std::exp(-0.5 * u);
  return std::pow(1.0 + u / nu_, -0.5 * (nu_ + 1.0));
}

double EllipticalSpec::normalization() const {
  // Even integrand: int_R g(r^2) dr = 2 * int_{-inf}^{0} g(r^2) dr.
  const double half = integrate_half_line(
      [this](double r) { return generator_value(r * r); }, 0.0, 1e-12);
  return 1.0 / (2.0 * half);
}

double rho1_elliptical(const EllipticalSpec& spec) {
  const BivariateNormalParams& p = spec.params();
  const double s2 = p.var_x + p.var_y;
  if (!(s2 > 0.0))
    throw invalid_argument_error("rho1_elliptical: sigma_x^2 + sigma_y^2 must be > 0");
  const double tau2 = s2 - 2.0 * p.cov_xy;
  if (tau2 < -1e-12 * s2)
    throw invalid_covariance_error("rho1_elliptical: tau^2 < 0 (non-PSD input)");
  const double gamma = p.mu_x - p.mu_y;
  const double tau = std::sqrt(std::max(tau2, 0.0));

  const double cg = spec.normalization();
  const double tol = 1e-10;

  // E|D| for D elliptical with location gamma and scale `s`.
  auto mean_abs = [&](double s) {
    if (s <= 0.0) return std::abs(gamma);
    const double alpha = gamma / s;
    const double i_g = integrate_half_line(
        [&spec](double r) { return spec.generator_value(r * r); }, -alpha, tol);
    const double i_rg = integrate_half_line(
        [&spec](double r) { return r * spec.generator_value(r * r); }, -alpha,
        tol);
    return gamma * (1.0 - 2.0 * cg * i_g) - 2.0 * cg * s * i_rg;
  };

  const double num = mean_abs(tau);
  const double den = mean_abs(std::sqrt(s2));
  if (!(std::isfinite(num) && std::isfinite(den)) || den == 0.0)
    throw numeric_error("rho1_elliptical: quadrature produced unusable values");
  return 1.0 - num / den;
}

}  // namespace concord
