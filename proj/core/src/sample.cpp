#include "concord/sample.hpp"

#include <cmath>
#include <utility>

#include "concord/errors.hpp"

namespace concord {

PairedSample::PairedSample(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size())
    throw invalid_data_error("PairedSample: x and y lengths differ");
  if (x_.size() < 2)
    throw insufficient_data_error("PairedSample: need at least 2 pairs");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
      throw invalid_data_error("PairedSample: non-finite value at index " +
                               std::to_string(i));
  }
}

SampleMoments summarize(const PairedSample& sample, DivisorMode mode) {
  const auto& x = sample.x();
  const auto& y = sample.y();
  const std::size_t n = sample.n();

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double divisor = mode == DivisorMode::unbiased
                             ? static_cast<double>(n - 1)
                             : static_cast<double>(n);

  SampleMoments m;
  m.mean_x = mx;
  m.mean_y = my;
  m.var_x = sxx / divisor;
  m.var_y = syy / divisor;
  m.cov_xy = sxy / divisor;
  m.n = n;
  m.divisor_mode = mode;
  return m;
}

BivariateNormalFit fit_bivariate_normal(const PairedSample& sample) {
  const SampleMoments m = summarize(sample, DivisorMode::ml);
  BivariateNormalFit fit;
  fit.params.mu_x = m.mean_x;
  fit.params.mu_y = m.mean_y;
  fit.params.var_x = m.var_x;
  fit.params.var_y = m.var_y;
  fit.params.cov_xy = m.cov_xy;
  fit.degenerate = (m.var_x == 0.0 && m.var_y == 0.0);
  return fit;
}

}  // namespace concord
