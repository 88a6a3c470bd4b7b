#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace concord {

/// Aligned measurements (X_i, Y_i) of the same quantity from two methods.
/// Immutable after construction; construction validates the invariants
/// (equal lengths, n >= 2, all values finite).
class PairedSample {
 public:
  PairedSample(std::vector<double> x, std::vector<double> y);

  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& y() const noexcept { return y_; }
  std::size_t n() const noexcept { return x_.size(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

enum class DivisorMode { unbiased, ml };  // n-1 vs n

struct SampleMoments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov_xy = 0.0;
  std::size_t n = 0;
  DivisorMode divisor_mode = DivisorMode::unbiased;
};

/// Means, variances and covariance with the requested divisor (the
/// covariance uses the same divisor as the variances).
SampleMoments summarize(const PairedSample& sample, DivisorMode mode);

/// Bivariate normal parameters (population values or ML estimates).
/// Invariant: cov_xy^2 <= var_x * var_y (positive semidefinite).
struct BivariateNormalParams {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov_xy = 0.0;
};

struct BivariateNormalFit {
  BivariateNormalParams params;
  /// True when both channels have zero variance; the fit is still returned.
  bool degenerate = false;
};

/// Maximum-likelihood fit (divisor n for variances and covariance).
BivariateNormalFit fit_bivariate_normal(const PairedSample& sample);

/// Point estimate with uncertainty, shared by the inferential operations.
struct AgreementEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.05;
  std::string method;
};

}  // namespace concord
