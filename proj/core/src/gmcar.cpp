#include "concord/gmcar.hpp"

#include <cmath>
#include <string>

#include "concord/errors.hpp"

namespace concord {

void validate(const LatticeSpec& spec) {
  const Eigen::Index n = spec.n();
  if (n < 1) throw invalid_argument_error("LatticeSpec: empty lattice");
  if (spec.w1.cols() != n)
    throw invalid_argument_error("LatticeSpec: adjacency not square");
  if (spec.mu1.size() != n || spec.mu2.size() != n)
    throw invalid_argument_error("LatticeSpec: mean length mismatch");
  if (!(spec.tau1 > 0.0) || !(spec.tau2 > 0.0))
    throw invalid_argument_error("LatticeSpec: precisions must be > 0");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (spec.w1(i, i) != 0.0)
      throw invalid_argument_error("LatticeSpec: adjacency diagonal must be 0");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = spec.w1(i, j);
      if (w != 0.0 && w != 1.0)
        throw invalid_argument_error("LatticeSpec: adjacency must be 0/1");
      if (w != spec.w1(j, i))
        throw invalid_argument_error("LatticeSpec: adjacency not symmetric");
    }
  }
}

namespace {

// Inverse of tau (D_w - rho W1); throws naming the factor when not PD.
Eigen::MatrixXd car_covariance(const LatticeSpec& spec, double rho, double tau,
                               int which) {
  const Eigen::Index n = spec.n();
  Eigen::MatrixXd precision = -rho * spec.w1;
  precision.diagonal() += spec.row_sums();
  precision *= tau;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw invalid_covariance_error(
        "gmcar_covariance: tau" + std::to_string(which) + " (D_w - rho" +
        std::to_string(which) + " W1) is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

GmcarCovariance gmcar_covariance(const LatticeSpec& spec) {
  validate(spec);
  const Eigen::Index n = spec.n();
  GmcarCovariance cov;
  cov.s22 = car_covariance(spec, spec.rho2, spec.tau2, 2);
  const Eigen::MatrixXd link =
      spec.eta0 * Eigen::MatrixXd::Identity(n, n) + spec.eta1 * spec.w1;
  cov.s12 = link * cov.s22;
  cov.s11 = car_covariance(spec, spec.rho1, spec.tau1, 1) +
            link * cov.s22 * link;
  return cov;
}

double lattice_ccc(const LatticeSpec& spec) {
  const GmcarCovariance cov = gmcar_covariance(spec);
  const double num = 2.0 * cov.s12.sum();  // Tr[J A] = sum of entries of A
  const Eigen::VectorXd shift = spec.mu1 - spec.mu2;
  const double total_shift = shift.sum();
  const double den = cov.s11.sum() + cov.s22.sum() + total_shift * total_shift;
  if (den <= 0.0) throw degenerate_error("lattice_ccc: degenerate denominator");
  return num / den;
}

Eigen::MatrixXd adjacency_from_edges(
    Eigen::Index n, const std::vector<std::pair<int, int>>& edges) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw invalid_argument_error("adjacency_from_edges: node id out of range");
    if (a == b)
      throw invalid_argument_error("adjacency_from_edges: self-loop");
    w(a, b) = 1.0;
    w(b, a) = 1.0;
  }
  return w;
}

}  // namespace concord
