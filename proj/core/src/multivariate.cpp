#include "concord/multivariate.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "concord/errors.hpp"

namespace concord {

Eigen::MatrixXd MvParams::stacked_covariance() const {
  const Eigen::Index d = p();
  Eigen::MatrixXd s(2 * d, 2 * d);
  s.topLeftCorner(d, d) = sigma_x;
  s.topRightCorner(d, d) = sigma_xy;
  s.bottomLeftCorner(d, d) = sigma_xy.transpose();
  s.bottomRightCorner(d, d) = sigma_y;
  return s;
}

void validate(const MvParams& params) {
  const Eigen::Index d = params.p();
  if (params.mu_y.size() != d || params.sigma_x.rows() != d ||
      params.sigma_x.cols() != d || params.sigma_y.rows() != d ||
      params.sigma_y.cols() != d || params.sigma_xy.rows() != d ||
      params.sigma_xy.cols() != d)
    throw invalid_argument_error("MvParams: inconsistent dimensions");
  const Eigen::MatrixXd s = params.stacked_covariance();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const double scale = std::max(1.0, s.diagonal().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
    throw invalid_covariance_error("MvParams: stacked covariance not PSD");
}

WeightMatrix::WeightMatrix(Eigen::MatrixXd d) : d_(std::move(d)) {
  if (d_.rows() != d_.cols())
    throw invalid_argument_error("WeightMatrix: not square");
  if (!d_.isApprox(d_.transpose(), 1e-10))
    throw invalid_argument_error("WeightMatrix: not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d_);
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw invalid_argument_error("WeightMatrix: negative definite direction");
}

WeightMatrix WeightMatrix::identity(Eigen::Index p) {
  return WeightMatrix(Eigen::MatrixXd::Identity(p, p));
}

double rm_ccc(const MvParams& params, const WeightMatrix& d) {
  validate(params);
  const Eigen::MatrixXd& w = d.matrix();
  if (w.rows() != params.p())
    throw invalid_argument_error("rm_ccc: weight dimension mismatch");
  const double num =
      (w * params.sigma_xy + w * params.sigma_xy.transpose()).trace();
  const Eigen::VectorXd shift = params.mu_x - params.mu_y;
  const double den = (w * params.sigma_x + w * params.sigma_y).trace() +
                     shift.dot(w * shift);
  if (den <= 0.0) throw degenerate_error("rm_ccc: nonpositive denominator");
  return num / den;
}

namespace {

// Inverse symmetric square root with a relative eigenvalue floor; throws
// naming the offending dimension when v_i is numerically singular.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& v_i) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v_i);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double floor = 1e-12 * std::max(1.0, ev.maxCoeff());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev[k] < floor) {
      Eigen::Index dim;
      eig.eigenvectors().col(k).cwiseAbs().maxCoeff(&dim);
      throw degenerate_error(
          "matrix_ccc: independence covariance singular along dimension " +
          std::to_string(dim));
    }
  }
  return eig.eigenvectors() *
         ev.cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace

MatrixCcc matrix_ccc_population(const Eigen::MatrixXd& v_d,
                                const Eigen::MatrixXd& v_i) {
  if (v_d.rows() != v_d.cols() || v_i.rows() != v_i.cols() ||
      v_d.rows() != v_i.rows())
    throw invalid_argument_error("matrix_ccc_population: dimension mismatch");
  const Eigen::MatrixXd w = inverse_sqrt(v_i);
  const Eigen::MatrixXd m = w * v_d * w;
  const double p = static_cast<double>(v_d.rows());
  MatrixCcc out;
  out.value = 1.0 - (m.transpose() * m).trace() / p;
  out.below_minus_one = out.value < -1.0;
  return out;
}

VectorPairSample::VectorPairSample(std::vector<Eigen::VectorXd> x_in,
                                   std::vector<Eigen::VectorXd> y_in)
    : x(std::move(x_in)), y(std::move(y_in)) {
  if (x.size() != y.size())
    throw invalid_data_error("VectorPairSample: pair count mismatch");
  if (x.size() < 2)
    throw insufficient_data_error("VectorPairSample: need n >= 2");
  const Eigen::Index d = x.front().size();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].size() != d || y[i].size() != d)
      throw invalid_data_error("VectorPairSample: inconsistent dimension");
}

MatrixCccSample matrix_ccc_sample(const VectorPairSample& sample) {
  const std::size_t n = sample.n();
  const Eigen::Index d = sample.p();
  const double nn = static_cast<double>(n);

  Eigen::MatrixXd v_d = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sum_xx = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sum_yy = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd sum_x = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sum_y = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd diff = sample.x[i] - sample.y[i];
    v_d += diff * diff.transpose();
    sum_xx += sample.x[i] * sample.x[i].transpose();
    sum_yy += sample.y[i] * sample.y[i].transpose();
    sum_x += sample.x[i];
    sum_y += sample.y[i];
  }
  v_d /= nn;

  // sum_{i != j} (Xi-Yj)(Xi-Yj)^T expanded to O(n p^2); the brute-force
  // double sum is kept as a test oracle.
  Eigen::MatrixXd cross = nn * sum_xx + nn * sum_yy -
                          sum_x * sum_y.transpose() -
                          sum_y * sum_x.transpose() - nn * v_d;
  Eigen::MatrixXd v_i = cross / (nn * (nn - 1.0));
  v_i = 0.5 * (v_i + v_i.transpose());  // kill roundoff asymmetry

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v_i);
  if (eig.eigenvalues().minCoeff() <
      -1e-10 * std::max(1.0, v_i.diagonal().maxCoeff()))
    throw numeric_error("matrix_ccc_sample: V_I lost positive semidefiniteness");

  MatrixCccSample out;
  out.v_d = std::move(v_d);
  out.v_i = std::move(v_i);
  out.ccc = matrix_ccc_population(out.v_d, out.v_i);
  return out;
}

}  // namespace concord
