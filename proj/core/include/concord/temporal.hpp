#pragma once

#include <Eigen/Dense>
#include <vector>

#include "concord/rng.hpp"
#include "concord/sample.hpp"

namespace concord {

/// Panel of paired curves: subject i measured on a shared ascending time
/// grid t_1..t_N; x and y are n x N (subject by time).
struct LongitudinalSample {
  std::vector<double> times;
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;

  LongitudinalSample(std::vector<double> times, Eigen::MatrixXd x,
                     Eigen::MatrixXd y);
  std::size_t subjects() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t grid_size() const { return times.size(); }

  /// Gaps between consecutive observation times; the unstated last gap uses
  /// the previous one, and a single-point grid uses a unit gap.
  std::vector<double> gaps() const;
};

enum class Kernel { gaussian, epanechnikov };

struct WeightFunction {
  std::vector<double> values;  // w(t_j) >= 0 on the grid
  double bandwidth = 0.0;
  Kernel kernel = Kernel::gaussian;
};

/// Kernel density estimate of the observation-time density, evaluated on
/// the grid itself: w(t) = (1/(N h)) sum_j K((t_j - t)/h).
WeightFunction kernel_weights(const std::vector<double>& times, Kernel kernel,
                              double bandwidth);

/// Silverman's rule on the time points: 0.9 min(sd, IQR/1.34) N^{-1/5}.
double silverman_bandwidth(const std::vector<double>& times);

struct FunctionalCcc {
  double value = 0.0;  // clamped to [-1, 1]
  double raw = 0.0;    // as computed; sampling noise can leak past +-1
};

/// Weighted time-integrated concordance between the two curve panels.
FunctionalCcc functional_ccc(const LongitudinalSample& data,
                             const WeightFunction& weights);

/// Two series observed on matched (not necessarily equispaced) times.
struct SeriesPair {
  std::vector<double> x;
  std::vector<double> y;

  SeriesPair(std::vector<double> x, std::vector<double> y);
  std::size_t length() const { return x.size(); }
};

/// Comovement: cosine of the angle between the first-difference vectors,
///   sum dx_t dy_t / sqrt(sum dx_t^2 sum dy_t^2).
/// Differences are raw, never spacing-normalized, so unequal observation
/// gaps are acceptable as long as the two series are temporally matched.
double comovement(const SeriesPair& pair);

/// Percentile CI for the comovement from a circular block bootstrap over
/// the paired first-difference sequence (pairing preserved inside blocks).
AgreementEstimate comovement_block_bootstrap(const SeriesPair& pair,
                                             std::size_t block_len, int b,
                                             double alpha, Rng& rng);

/// Default block length: ceil(length^(1/3)).
std::size_t default_block_length(std::size_t series_length);

}  // namespace concord
