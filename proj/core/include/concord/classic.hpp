#pragma once

#include <vector>

#include "concord/rng.hpp"
#include "concord/sample.hpp"

namespace concord {

/// Pearson correlation from second moments. Throws degenerate_error when a
/// variance is zero.
double pearson(const SampleMoments& m);

/// Lin's concordance correlation coefficient,
///   rho_c = 2 s_xy / (s_x^2 + s_y^2 + (mean_x - mean_y)^2).
/// The one degenerate case (both channels constant and equal) reports
/// perfect agreement, 1.
double lin_ccc(const SampleMoments& m);

/// rho_c = rho * C_b split into precision (rho) and accuracy (C_b) parts,
/// with scale ratio v = sx/sy and location shift u = (mx - my)/sqrt(sx*sy).
struct CccDecomposition {
  double rho = 0.0;
  double c_b = 0.0;
  double v = 0.0;
  double u = 0.0;
  double ccc() const { return rho * c_b; }
};

CccDecomposition ccc_decompose(const BivariateNormalParams& p);

/// Fisher z-transform inference for the CCC.
struct FisherZInference {
  double estimate = 0.0;  // rho_c hat
  double z_hat = 0.0;
  double sigma_z = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.05;
  bool degenerate = false;      // |rho_c| at the clamp boundary
  bool used_bootstrap = false;  // z-variance undefined, bootstrap CI instead

  /// Two-sided p-value for H0: rho_c = rho0 on the z scale.
  double p_value(double rho0) const;
};

/// Asymptotic CI via z = atanh(rho_c) with Lin's variance. When the sample
/// Pearson correlation is numerically zero (|rho| < 1e-8) the z variance is
/// undefined and a seeded nonparametric bootstrap (2000 resamples,
/// percentile CI) is substituted and flagged.
FisherZInference ccc_inference(const PairedSample& sample, double alpha,
                               Rng rng = Rng(0x1566));

/// Bland-Altman limits of agreement on differences D_i = X_i - Y_i.
struct LimitsOfAgreement {
  double mean_diff = 0.0;  // systematic bias estimate
  double sd_diff = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double coverage_multiplier = 1.96;
  std::vector<double> pair_means;  // (X_i + Y_i)/2, plotting abscissa
  std::vector<double> pair_diffs;  // D_i, plotting ordinate
};

LimitsOfAgreement bland_altman(const PairedSample& sample,
                               double multiplier = 1.96);

/// CCC from the mean squared error and the ML covariance:
///   rho_c = (1 + MSE / (2 sigma_xy))^{-1}.
/// Algebraically identical to lin_ccc under ML moments.
double ccc_from_mse(double mse, double cov_ml);

/// Mean squared error (1/n) sum (x_i - y_i)^2.
double mean_squared_error(const PairedSample& sample);

/// First-order approximation to rho_c(X, g(X)) around mu:
///   2 g' s^2 / (s^2 (1 + g'^2) + (mu - g(mu))^2).
double ccc_transform_first_order(double g_at_mu, double g_prime_at_mu,
                                 double mu_x, double var_x);

/// Second-order sensitivity for a nearly linear map g(x) = x + eps h(x):
///   1 - eps^2 h(mu)^2 / (2 s^2) - eps^2 h'(mu)^2 / 2.
/// Valid for |eps| << 1 (not enforced).
double ccc_transform_perturbation(double h_at_mu, double h_prime_at_mu,
                                  double var_x, double eps);

/// Regression-calibration workflow: OLS of the reference channel (y) on the
/// device channel (x), then CCC inference between observed and predicted
/// reference values.
struct CalibrationReport {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  double r2_adj = 0.0;
  std::size_t n = 0;
  FisherZInference ccc;
  std::vector<double> predicted;  // fitted reference-scale values
};

CalibrationReport calibrate_and_agree(const PairedSample& sample, double alpha,
                                      Rng rng = Rng(0x1566));

}  // namespace concord
