#pragma once

#include <Eigen/Dense>
#include <vector>

namespace concord {

/// Joint Gaussian parameters for two p-vectors: the stacked 2p covariance
/// [[sigma_x, sigma_xy], [sigma_xy^T, sigma_y]] must be PSD (checked by the
/// operations). sigma_xy need not be symmetric.
struct MvParams {
  Eigen::VectorXd mu_x;
  Eigen::VectorXd mu_y;
  Eigen::MatrixXd sigma_x;
  Eigen::MatrixXd sigma_y;
  Eigen::MatrixXd sigma_xy;

  Eigen::Index p() const { return mu_x.size(); }
  Eigen::MatrixXd stacked_covariance() const;
};

void validate(const MvParams& params);

/// Symmetric nonnegative-definite weights among repeated measurements.
class WeightMatrix {
 public:
  explicit WeightMatrix(Eigen::MatrixXd d);
  static WeightMatrix identity(Eigen::Index p);
  const Eigen::MatrixXd& matrix() const noexcept { return d_; }

 private:
  Eigen::MatrixXd d_;
};

/// Repeated-measures concordance
///   Tr[D S_xy + D S_xy^T] / (Tr[D S_x + D S_y] + (mu_x-mu_y)^T D (mu_x-mu_y)).
double rm_ccc(const MvParams& params, const WeightMatrix& d);

/// Matrix-based CCC with the (squared-Frobenius) norm g(A) = tr(A^T A):
///   1 - g(V_I^{-1/2} V_D V_I^{-1/2}) / g(I_p).
/// Values below -1 are possible for extreme V_D; the raw value is returned
/// with a range flag.
struct MatrixCcc {
  double value = 0.0;
  bool below_minus_one = false;
};

MatrixCcc matrix_ccc_population(const Eigen::MatrixXd& v_d,
                                const Eigen::MatrixXd& v_i);

/// n paired p-vectors (X_i, Y_i).
struct VectorPairSample {
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> y;

  VectorPairSample(std::vector<Eigen::VectorXd> x,
                   std::vector<Eigen::VectorXd> y);
  std::size_t n() const { return x.size(); }
  Eigen::Index p() const { return x.front().size(); }
};

struct MatrixCccSample {
  MatrixCcc ccc;
  Eigen::MatrixXd v_d;  // (1/n) sum (Xi-Yi)(Xi-Yi)^T
  Eigen::MatrixXd v_i;  // (1/(n(n-1))) sum_{i != j} (Xi-Yj)(Xi-Yj)^T
};

MatrixCccSample matrix_ccc_sample(const VectorPairSample& sample);

}  // namespace concord
