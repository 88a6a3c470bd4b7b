#pragma once

#include <Eigen/Dense>

#include "concord/rng.hpp"

namespace concord {

/// n independent draws from N(mean, cov), one draw per row.
///
/// Transform: lower Cholesky factor applied to iid standard normals. For
/// covariances that are only semidefinite the plain factorization fails and
/// a symmetric-eigendecomposition fallback is used, with eigenvalues below
/// -1e-10*scale rejected as invalid-covariance (tinier ones clamped to 0).
Eigen::MatrixXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov, int n, Rng& rng);

/// Factor usable to draw repeatedly from the same distribution.
class MvnSampler {
 public:
  MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);

  Eigen::VectorXd draw(Rng& rng) const;
  Eigen::MatrixXd draw_many(int n, Rng& rng) const;
  const Eigen::MatrixXd& transform() const noexcept { return transform_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd transform_;  // L with L L^T = cov
};

}  // namespace concord
