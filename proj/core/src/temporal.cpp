#include "concord/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "concord/errors.hpp"
#include "concord/special.hpp"
#include "concord/stats_util.hpp"

namespace concord {

LongitudinalSample::LongitudinalSample(std::vector<double> times_in,
                                       Eigen::MatrixXd x_in,
                                       Eigen::MatrixXd y_in)
    : times(std::move(times_in)), x(std::move(x_in)), y(std::move(y_in)) {
  if (times.empty())
    throw insufficient_data_error("LongitudinalSample: empty time grid");
  for (std::size_t j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1]))
      throw invalid_data_error(
          "LongitudinalSample: times must be strictly ascending");
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw invalid_data_error("LongitudinalSample: x/y shape mismatch");
  if (static_cast<std::size_t>(x.cols()) != times.size())
    throw invalid_data_error("LongitudinalSample: columns must match grid");
  if (x.rows() < 1)
    throw insufficient_data_error("LongitudinalSample: need >= 1 subject");
  if (!x.allFinite() || !y.allFinite())
    throw invalid_data_error("LongitudinalSample: non-finite values");
}

std::vector<double> LongitudinalSample::gaps() const {
  const std::size_t N = times.size();
  std::vector<double> d(N, 1.0);
  if (N == 1) return d;
  for (std::size_t j = 0; j + 1 < N; ++j) d[j] = times[j + 1] - times[j];
  d[N - 1] = d[N - 2];
  return d;
}

namespace {

double kernel_value(Kernel k, double u) {
  switch (k) {
    case Kernel::gaussian:
      return normal_pdf(u);
    case Kernel::epanechnikov:
      return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

}  // namespace

WeightFunction kernel_weights(const std::vector<double>& times, Kernel kernel,
                              double bandwidth) {
  if (times.empty())
    throw insufficient_data_error("kernel_weights: empty grid");
  if (!(bandwidth > 0.0))
    throw invalid_argument_error("kernel_weights: bandwidth must be > 0");
  const double nh = static_cast<double>(times.size()) * bandwidth;
  WeightFunction w;
  w.bandwidth = bandwidth;
  w.kernel = kernel;
  w.values.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    double acc = 0.0;
    for (double tj : times) acc += kernel_value(kernel, (tj - times[i]) / bandwidth);
    w.values[i] = acc / nh;
  }
  return w;
}

double silverman_bandwidth(const std::vector<double>& times) {
  if (times.size() < 2)
    throw insufficient_data_error("silverman_bandwidth: need >= 2 points");
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  const double sd = sd_of(sorted);
  const double iqr =
      quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0))
    throw invalid_argument_error("silverman_bandwidth: zero spread in times");
  return 0.9 * spread *
         std::pow(static_cast<double>(times.size()), -0.2);
}

FunctionalCcc functional_ccc(const LongitudinalSample& data,
                             const WeightFunction& weights) {
  if (data.subjects() < 2)
    throw insufficient_data_error("functional_ccc: need >= 2 subjects");
  if (weights.values.size() != data.grid_size())
    throw invalid_argument_error("functional_ccc: weights not aligned to grid");

  const std::size_t n = data.subjects();
  const std::size_t N = data.grid_size();
  const std::vector<double> delta = data.gaps();

  const Eigen::RowVectorXd mean_x = data.x.colwise().mean();
  const Eigen::RowVectorXd mean_y = data.y.colwise().mean();

  double num = 0.0, mean_gap = 0.0, spread = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const double wd = weights.values[j] * delta[j];
    double cross = 0.0, dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = data.x(i, j) - mean_x(j);
      const double dy = data.y(i, j) - mean_y(j);
      cross += dx * dy;
      dev += dx * dx + dy * dy;
    }
    num += cross * wd;
    spread += dev * wd;
    const double md = mean_x(j) - mean_y(j);
    mean_gap += md * md * wd;
  }
  const double nn = static_cast<double>(n);
  const double denom = mean_gap + spread / nn;
  if (denom == 0.0) throw degenerate_error("functional_ccc: zero denominator");

  FunctionalCcc out;
  out.raw = (2.0 * num / nn) / denom;
  out.value = std::clamp(out.raw, -1.0, 1.0);
  return out;
}

SeriesPair::SeriesPair(std::vector<double> x_in, std::vector<double> y_in)
    : x(std::move(x_in)), y(std::move(y_in)) {
  if (x.size() != y.size())
    throw invalid_data_error("SeriesPair: length mismatch");
  if (x.size() < 2)
    throw insufficient_data_error("SeriesPair: need length >= 2");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw invalid_data_error("SeriesPair: non-finite value");
}

namespace {

double comovement_of_diffs(const std::vector<double>& dx,
                           const std::vector<double>& dy) {
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < dx.size(); ++t) {
    sxy += dx[t] * dy[t];
    sxx += dx[t] * dx[t];
    syy += dy[t] * dy[t];
  }
  if (sxx == 0.0 || syy == 0.0)
    throw degenerate_error("comovement: a series has constant values");
  return sxy / std::sqrt(sxx * syy);
}

std::pair<std::vector<double>, std::vector<double>> first_differences(
    const SeriesPair& pair) {
  const std::size_t m = pair.length() - 1;
  std::vector<double> dx(m), dy(m);
  for (std::size_t t = 0; t < m; ++t) {
    dx[t] = pair.x[t + 1] - pair.x[t];
    dy[t] = pair.y[t + 1] - pair.y[t];
  }
  return {std::move(dx), std::move(dy)};
}

}  // namespace

double comovement(const SeriesPair& pair) {
  const auto [dx, dy] = first_differences(pair);
  return comovement_of_diffs(dx, dy);
}

std::size_t default_block_length(std::size_t series_length) {
  return static_cast<std::size_t>(
      std::ceil(std::cbrt(static_cast<double>(series_length))));
}

AgreementEstimate comovement_block_bootstrap(const SeriesPair& pair,
                                             std::size_t block_len, int b,
                                             double alpha, Rng& rng) {
  const std::size_t m = pair.length() - 1;
  if (block_len < 1 || block_len > m)
    throw invalid_argument_error(
        "comovement_block_bootstrap: block length must lie in [1, length-1]");
  if (b < 100)
    throw invalid_argument_error("comovement_block_bootstrap: need b >= 100");

  const auto [dx, dy] = first_differences(pair);
  const double point = comovement_of_diffs(dx, dy);

  std::vector<double> stats;
  stats.reserve(b);
  std::vector<double> rx(m), ry(m);
  for (int rep = 0; rep < b; ++rep) {
    Rng task = rng.derive(static_cast<std::uint64_t>(rep));
    std::size_t filled = 0;
    while (filled < m) {
      const std::size_t start = task.uniform_below(m);
      for (std::size_t k = 0; k < block_len && filled < m; ++k, ++filled) {
        const std::size_t idx = (start + k) % m;  // circular scheme
        rx[filled] = dx[idx];
        ry[filled] = dy[idx];
      }
    }
    try {
      stats.push_back(comovement_of_diffs(rx, ry));
    } catch (const degenerate_error&) {
      // all-constant resample; skip
    }
  }
  if (stats.empty())
    throw degenerate_error("comovement_block_bootstrap: no valid resamples");
  std::sort(stats.begin(), stats.end());

  AgreementEstimate est;
  est.estimate = point;
  est.std_error = sd_of(stats);
  est.ci_low = quantile_sorted(stats, alpha / 2.0);
  est.ci_high = quantile_sorted(stats, 1.0 - alpha / 2.0);
  est.alpha = alpha;
  est.method = "circular-block-bootstrap";
  return est;
}

}  // namespace concord
