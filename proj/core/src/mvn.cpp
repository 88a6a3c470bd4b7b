#include "concord/mvn.hpp"

#include <cmath>
#include <utility>

#include "concord/errors.hpp"

namespace concord {

namespace {

Eigen::MatrixXd psd_transform(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols())
    throw invalid_covariance_error("sample_mvn: covariance not square");
  if (!cov.isApprox(cov.transpose(), 1e-10))
    throw invalid_covariance_error("sample_mvn: covariance not symmetric");

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  // Semidefinite fallback: symmetric eigendecomposition with roundoff
  // clamping. Plain LDLT flags exactly singular PSD matrices as numerical
  // issues, so it cannot serve here.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw invalid_covariance_error("sample_mvn: factorization failed");
  Eigen::VectorXd d = eig.eigenvalues();
  const double scale = std::max(1.0, cov.diagonal().maxCoeff());
  for (int i = 0; i < d.size(); ++i) {
    if (d[i] < -1e-10 * scale)
      throw invalid_covariance_error(
          "sample_mvn: covariance has negative eigenvalue direction");
    // zero out roundoff-scale eigenvalues so degenerate directions stay
    // exactly degenerate in the draws
    if (d[i] < 1e-12 * scale) d[i] = 0.0;
  }
  return eig.eigenvectors() * d.cwiseSqrt().asDiagonal();
}

}  // namespace

MvnSampler::MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov)
    : mean_(std::move(mean)), transform_(psd_transform(cov)) {
  if (mean_.size() != transform_.rows())
    throw invalid_covariance_error("MvnSampler: mean/covariance size mismatch");
}

Eigen::VectorXd MvnSampler::draw(Rng& rng) const {
  Eigen::VectorXd z(mean_.size());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean_ + transform_ * z;
}

Eigen::MatrixXd MvnSampler::draw_many(int n, Rng& rng) const {
  Eigen::MatrixXd out(n, mean_.size());
  Eigen::VectorXd z(mean_.size());
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
    out.row(r) = (mean_ + transform_ * z).transpose();
  }
  return out;
}

Eigen::MatrixXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov, int n, Rng& rng) {
  return MvnSampler(mean, cov).draw_many(n, rng);
}

}  // namespace concord
