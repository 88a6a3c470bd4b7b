#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace concord {

/// GMCAR(rho1, rho2, eta0, eta1, tau1, tau2) specification on an n-node
/// lattice with symmetric 0/1 adjacency W1. Admissibility of (rho1, rho2)
/// is operational: tau_k (D_w - rho_k W1) must be positive definite, which
/// is decided by Cholesky success.
struct LatticeSpec {
  Eigen::MatrixXd w1;
  Eigen::VectorXd mu1;
  Eigen::VectorXd mu2;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double eta0 = 0.0;
  double eta1 = 0.0;
  double tau1 = 1.0;
  double tau2 = 1.0;

  Eigen::Index n() const { return w1.rows(); }
  Eigen::VectorXd row_sums() const { return w1.rowwise().sum(); }
};

void validate(const LatticeSpec& spec);

struct GmcarCovariance {
  Eigen::MatrixXd s11;
  Eigen::MatrixXd s12;
  Eigen::MatrixXd s22;
};

/// Joint covariance blocks:
///   S22 = [tau2 (D_w - rho2 W1)]^{-1}
///   S12 = (eta0 I + eta1 W1) S22
///   S11 = [tau1 (D_w - rho1 W1)]^{-1} + (eta0 I + eta1 W1) S22 (eta0 I + eta1 W1)
GmcarCovariance gmcar_covariance(const LatticeSpec& spec);

/// Lattice concordance with D = J_n = 1 1^T:
///   Tr[J S12 + J S12^T] / (Tr[J S11 + J S22] + (mu1-mu2)^T J (mu1-mu2));
/// Tr[J A] is the sum of all entries of A.
double lattice_ccc(const LatticeSpec& spec);

/// Dense 0/1 adjacency from an undirected edge list (0-based node ids).
Eigen::MatrixXd adjacency_from_edges(
    Eigen::Index n, const std::vector<std::pair<int, int>>& edges);

}  // namespace concord
